// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Superharmonic test functions, the quadrature inequality, cubic averages
// and second moments.

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smashlab/geometry.hpp"
#include "smashlab/grid.hpp"

namespace smashlab {

enum class TestFamily
{
    constant,
    coordinate,
    neg_square,
    newton,
    mollified_newton,
    custom,
};

/*!
 * A test function s: R^d -> R with the facts the checks need about it.
 *
 * Kernels are normalized so that r^{d-1} K'(r) = -1:
 * K = -r (d=1), -log r (d=2), 1/r (d=3). The mollified kernel is K
 * averaged against the radial bump (1 - t^2/rho^2)^3 on B_rho; it is
 * smooth and superharmonic everywhere and equals K outside B_rho(pole).
 */
class TestFunction
{
  public:
    static TestFunction constant(int dim, double value);
    static TestFunction coordinate(int dim, int axis, double sign);
    static TestFunction neg_square(int dim, Point center);
    static TestFunction newton(int dim, Point pole, double sign = 1);
    static TestFunction mollified_newton(int dim, Point pole, double rho, double sign = 1);
    //! Arbitrary evaluator; no analytic derivative facts.
    static TestFunction custom(int dim,
                               std::string id,
                               std::function<double(Point const&)> f);

    /*!
     * Config form: {"id": "one" | "neg_one" | "coord" | "neg_coord" |
     * "neg_square" | "newton" | "neg_newton" | "mollified_newton" |
     * "neg_mollified_newton", "axis", "center", "pole", "rho"}.
     */
    static TestFunction parse(nlohmann::json const& doc, int dim);

    double operator()(Point const& y) const;
    //! Analytic Laplacian (NaN where undefined or unavailable).
    double laplacian(Point const& y) const;

    int dim() const { return dim_; }
    TestFamily family() const { return family_; }
    std::string const& id() const { return id_; }
    double sign() const { return sign_; }
    std::optional<Point> const& pole() const { return pole_; }
    double rho() const { return rho_; }

    //! s - c, used to make s nonnegative on a working region.
    TestFunction shifted(double c) const;
    double offset() const { return offset_; }

    //! Whether a closed-form third-derivative bound exists.
    bool analytic_cs() const;

    /*!
     * Throws ConfigError unless s is superharmonic on a neighbourhood of
     * every true cell of m (poles must sit at least 4h away; the negated
     * mollified kernel needs rho + 4h).
     */
    void require_domain(Mask const& m) const;
    bool superharmonic_on(Mask const& m) const;
    //! Both s and -s superharmonic on the mask's cells.
    bool harmonic_on(Mask const& m) const;

    //! Radial profile u(r) of the (unsigned) kernel and its derivatives.
    struct Radial
    {
        double f, d1, d2, d3;
    };
    Radial radial(double r) const;

  private:
    int dim_ = 0;
    TestFamily family_ = TestFamily::constant;
    std::string id_;
    double sign_ = 1;
    double offset_ = 0;
    int axis_ = 0;
    Point center_{0, 0, 0};
    std::optional<Point> pole_;
    double rho_ = 0;
    std::array<double, 4> coeff_{0, 0, 0, 0};
    double k_at_rho_ = 0;
    std::function<double(Point const&)> custom_;
};

//! Newtonian kernel K(r) in dimension d (normalized as above).
double newton_kernel(int dim, double r);

//! Midpoint quadrature h^d * sum over true cells of s(center).
double integrate(TestFunction const& s, Mask const& m);
//! Midpoint quadrature of s * w.
double integrate(TestFunction const& s, DensityField const& w);

//! ∫ s w - ∫_domain s; the quadrature inequality predicts >= 0.
double quadrature_slack(Mask const& domain, DensityField const& w, TestFunction const& s);

//! Allowed violation for a slack check: sup |s| over the cells times the
//! measure of the domain's boundary cells.
double slack_tolerance(Mask const& domain, DensityField const& w, TestFunction const& s);

//! Average of f over the H-orbit of y about x.
double cubic_average(std::function<double(Point const&)> const& f,
                     int dim,
                     Point const& x,
                     Point const& y);

//! h^d * sum |center - about|^2 over true cells.
double second_moment(Mask const& m, Point const& about = {0, 0, 0});

//! Mass-weighted centroid of the true cells (origin for an empty mask).
Point centroid(Mask const& m);

/*!
 * Third-derivative constant c_s on a region (three times the Taylor
 * remainder constant sup|D^3 s|/6). Uses the closed form when available,
 * otherwise finite differences over the region times a safety factor 2.
 */
double estimate_cs(TestFunction const& s, Mask const& region);
//! Closed-form c_s on {y : |y - pole| >= distance}.
double analytic_cs_beyond(TestFunction const& s, double distance);
//! Finite-difference c_s over the region's cell centers.
double fd_cs(TestFunction const& s, Mask const& region);

//! (sum over the 2d axis neighbours at spacing h of s) - 2d s(y), over h^2.
double discrete_laplacian(TestFunction const& s, Point const& y, double h);

//! Running totals of the game: mass, s-integral and second moment.
struct MomentLedger
{
    double mass = 0;
    double s_integral = 0;
    double second_moment = 0;

    MomentLedger& operator+=(MomentLedger const& o)
    {
        mass += o.mass;
        s_integral += o.s_integral;
        second_moment += o.second_moment;
        return *this;
    }
    friend MomentLedger operator-(MomentLedger a, MomentLedger const& b)
    {
        a.mass -= b.mass;
        a.s_integral -= b.s_integral;
        a.second_moment -= b.second_moment;
        return a;
    }
};

MomentLedger moments_of(Mask const& m, TestFunction const& s);

//! One row of a slack report.
struct SlackRecord
{
    std::string id;
    double slack = 0;
    double tolerance = 0;
    //! s and -s both superharmonic on the cells: slack must bracket 0.
    bool harmonic = false;
    bool pass = false;
};

//! slack >= -tol, and |slack| <= tol when s is harmonic there.
SlackRecord check_slack(Mask const& domain, DensityField const& w, TestFunction const& s);

/*!
 * The built-in families placed around a region: ±1, ±x_1, -|y - c|^2 about
 * the centroid, ±Newtonian kernels at two poles outside the region and
 * mollified kernels (rho = 8h) at two poles inside it.
 */
std::vector<TestFunction> standard_test_functions(Mask const& region);

}  // namespace smashlab
