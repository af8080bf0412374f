// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smashlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace smashlab {

namespace {

constexpr std::array<double, 4> kBinom3{1, 3, 3, 1};

double distance(Point const& a, Point const& b, int dim)
{
    double s = 0;
    for (int i = 0; i < dim; ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

std::string point_text(Point const& p, int dim)
{
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim; ++i)
        os << (i ? "," : "") << p[i];
    os << ')';
    return os.str();
}

void require_dim(int dim)
{
    if (dim < 1 || dim > 3)
        throw ConfigError("test function: dimension must be 1, 2 or 3");
}

Point read_point(nlohmann::json const& doc, char const* key, int dim)
{
    if (!doc.contains(key) || !doc[key].is_array()
        || static_cast<int>(doc[key].size()) != dim)
    {
        std::ostringstream os;
        os << "test function: '" << key << "' must be an array of " << dim
           << " numbers";
        throw ConfigError(os.str());
    }
    Point p{0, 0, 0};
    for (int i = 0; i < dim; ++i)
        p[i] = doc[key][i].get<double>();
    return p;
}

//! Smallest distance from the pole to a true cell center of m.
double pole_distance(Mask const& m, Point const& pole)
{
    GridSpec const& g = m.grid();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        if (m[i])
            best = std::min(best, distance(g.center(i), pole, g.dim()));
    }
    return best;
}

// Bound on the largest directional third derivative of a radial function
// at radius r: |f'''| + 3 |f'' - f'/r| / r (just |f'''| on the line).
double radial_d3_bound(TestFunction::Radial const& q, double r, int dim)
{
    if (dim == 1)
        return std::abs(q.d3);
    return std::abs(q.d3) + 3 * std::abs(q.d2 - q.d1 / r) / r;
}

}  // namespace

double newton_kernel(int dim, double r)
{
    switch (dim)
    {
        case 1:
            return -r;
        case 2:
            return -std::log(r);
        default:
            return 1 / r;
    }
}

TestFunction TestFunction::constant(int dim, double value)
{
    require_dim(dim);
    TestFunction t;
    t.dim_ = dim;
    t.family_ = TestFamily::constant;
    t.sign_ = value;
    t.id_ = value == 1 ? "one" : value == -1 ? "neg_one" : "constant";
    return t;
}

TestFunction TestFunction::coordinate(int dim, int axis, double sign)
{
    require_dim(dim);
    if (axis < 0 || axis >= dim)
        throw ConfigError("test function: coordinate axis out of range");
    TestFunction t;
    t.dim_ = dim;
    t.family_ = TestFamily::coordinate;
    t.axis_ = axis;
    t.sign_ = sign < 0 ? -1 : 1;
    t.id_ = std::string(sign < 0 ? "neg_coord" : "coord") + std::to_string(axis);
    return t;
}

TestFunction TestFunction::neg_square(int dim, Point center)
{
    require_dim(dim);
    TestFunction t;
    t.dim_ = dim;
    t.family_ = TestFamily::neg_square;
    t.center_ = center;
    t.sign_ = 1;
    t.id_ = "neg_square" + point_text(center, dim);
    return t;
}

TestFunction TestFunction::newton(int dim, Point pole, double sign)
{
    require_dim(dim);
    TestFunction t;
    t.dim_ = dim;
    t.family_ = TestFamily::newton;
    t.pole_ = pole;
    t.sign_ = sign < 0 ? -1 : 1;
    t.id_ = std::string(sign < 0 ? "neg_newton" : "newton") + point_text(pole, dim);
    return t;
}

TestFunction TestFunction::mollified_newton(int dim, Point pole, double rho, double sign)
{
    require_dim(dim);
    if (!(rho > 0))
        throw ConfigError("test function: mollification radius must be positive");
    TestFunction t;
    t.dim_ = dim;
    t.family_ = TestFamily::mollified_newton;
    t.pole_ = pole;
    t.rho_ = rho;
    t.sign_ = sign < 0 ? -1 : 1;
    std::ostringstream os;
    os << (sign < 0 ? "neg_mollified_newton" : "mollified_newton")
       << point_text(pole, dim) << "rho=" << rho;
    t.id_ = os.str();

    // Inside rho: u(r) = K(rho) + sum_j c_j (rho^{2j+2} - r^{2j+2}) / (2j+2).
    double z = 0;
    for (int j = 0; j < 4; ++j)
        z += kBinom3[j] * (j % 2 ? -1 : 1) / (dim + 2.0 * j);
    z *= std::pow(rho, dim);
    for (int j = 0; j < 4; ++j)
    {
        t.coeff_[j] = kBinom3[j] * (j % 2 ? -1 : 1)
                      / ((dim + 2.0 * j) * std::pow(rho, 2 * j) * z);
    }
    t.k_at_rho_ = newton_kernel(dim, rho);
    return t;
}

TestFunction TestFunction::custom(int dim,
                                  std::string id,
                                  std::function<double(Point const&)> f)
{
    require_dim(dim);
    if (!f)
        throw ConfigError("test function: custom evaluator is empty");
    TestFunction t;
    t.dim_ = dim;
    t.family_ = TestFamily::custom;
    t.id_ = std::move(id);
    t.custom_ = std::move(f);
    return t;
}

TestFunction TestFunction::parse(nlohmann::json const& doc, int dim)
{
    if (doc.is_string())
        return parse(nlohmann::json{{"id", doc}}, dim);
    if (!doc.is_object() || !doc.contains("id") || !doc["id"].is_string())
        throw ConfigError("test function: expected an object with a string 'id'");
    auto const id = doc["id"].get<std::string>();
    int const axis = doc.value("axis", 0);
    if (id == "one")
        return constant(dim, 1);
    if (id == "neg_one")
        return constant(dim, -1);
    if (id == "coord")
        return coordinate(dim, axis, 1);
    if (id == "neg_coord")
        return coordinate(dim, axis, -1);
    if (id == "neg_square")
    {
        Point c{0, 0, 0};
        if (doc.contains("center"))
            c = read_point(doc, "center", dim);
        return neg_square(dim, c);
    }
    if (id == "newton" || id == "neg_newton")
        return newton(dim, read_point(doc, "pole", dim), id == "newton" ? 1 : -1);
    if (id == "mollified_newton" || id == "neg_mollified_newton")
    {
        if (!doc.contains("rho") || !doc["rho"].is_number())
            throw ConfigError("test function: mollified_newton needs a numeric 'rho'");
        return mollified_newton(dim,
                                read_point(doc, "pole", dim),
                                doc["rho"].get<double>(),
                                id == "mollified_newton" ? 1 : -1);
    }
    throw ConfigError("test function: unknown id '" + id + "'");
}

TestFunction::Radial TestFunction::radial(double r) const
{
    if (family_ == TestFamily::mollified_newton && r < rho_)
    {
        Radial q{k_at_rho_, 0, 0, 0};
        for (int j = 0; j < 4; ++j)
        {
            double const c = coeff_[j];
            q.f += c * (std::pow(rho_, 2 * j + 2) - std::pow(r, 2 * j + 2))
                   / (2 * j + 2);
            q.d1 -= c * std::pow(r, 2 * j + 1);
            q.d2 -= c * (2 * j + 1) * std::pow(r, 2 * j);
            if (j > 0)
                q.d3 -= c * (2 * j + 1) * (2 * j) * std::pow(r, 2 * j - 1);
        }
        return q;
    }
    switch (dim_)
    {
        case 1:
            return {-r, -1, 0, 0};
        case 2:
            return {-std::log(r), -1 / r, 1 / (r * r), -2 / (r * r * r)};
        default:
            return {1 / r, -1 / (r * r), 2 / (r * r * r), -6 / (r * r * r * r)};
    }
}

double TestFunction::operator()(Point const& y) const
{
    double v = 0;
    switch (family_)
    {
        case TestFamily::constant:
            v = sign_;
            break;
        case TestFamily::coordinate:
            v = sign_ * y[axis_];
            break;
        case TestFamily::neg_square:
        {
            double const r = distance(y, center_, dim_);
            v = -r * r;
            break;
        }
        case TestFamily::newton:
        case TestFamily::mollified_newton:
            v = sign_ * radial(distance(y, *pole_, dim_)).f;
            break;
        case TestFamily::custom:
            v = custom_(y);
            break;
    }
    return v - offset_;
}

double TestFunction::laplacian(Point const& y) const
{
    switch (family_)
    {
        case TestFamily::constant:
        case TestFamily::coordinate:
            return 0;
        case TestFamily::neg_square:
            return -2.0 * dim_;
        case TestFamily::newton:
        {
            double const r = distance(y, *pole_, dim_);
            return r > 0 ? 0 : std::numeric_limits<double>::quiet_NaN();
        }
        case TestFamily::mollified_newton:
        {
            double const r = distance(y, *pole_, dim_);
            if (r >= rho_)
                return 0;
            // f'' + (d-1) f'/r = -sum_j c_j (2j+d) r^{2j}
            double v = 0;
            for (int j = 0; j < 4; ++j)
                v -= coeff_[j] * (2 * j + dim_) * std::pow(r, 2 * j);
            return sign_ * v;
        }
        case TestFamily::custom:
            break;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

TestFunction TestFunction::shifted(double c) const
{
    TestFunction t = *this;
    t.offset_ += c;
    std::ostringstream os;
    os << id_ << (c >= 0 ? "-" : "+") << std::abs(c);
    t.id_ = os.str();
    return t;
}

bool TestFunction::analytic_cs() const
{
    return family_ != TestFamily::custom;
}

bool TestFunction::superharmonic_on(Mask const& m) const
{
    switch (family_)
    {
        case TestFamily::constant:
        case TestFamily::coordinate:
        case TestFamily::neg_square:
            return true;
        case TestFamily::newton:
            return pole_distance(m, *pole_) >= 4 * m.grid().h();
        case TestFamily::mollified_newton:
            return sign_ > 0
                   || pole_distance(m, *pole_) >= rho_ + 4 * m.grid().h();
        case TestFamily::custom:
            return false;
    }
    return false;
}

bool TestFunction::harmonic_on(Mask const& m) const
{
    switch (family_)
    {
        case TestFamily::constant:
        case TestFamily::coordinate:
            return true;
        case TestFamily::neg_square:
        case TestFamily::custom:
            return false;
        case TestFamily::newton:
            return pole_distance(m, *pole_) >= 4 * m.grid().h();
        case TestFamily::mollified_newton:
            return pole_distance(m, *pole_) >= rho_ + 4 * m.grid().h();
    }
    return false;
}

void TestFunction::require_domain(Mask const& m) const
{
    if (family_ == TestFamily::custom || superharmonic_on(m))
        return;
    std::ostringstream os;
    os << "test function " << id_ << ": pole " << point_text(*pole_, dim_)
       << " is too close to the region (distance "
       << pole_distance(m, *pole_) << ")";
    throw ConfigError(os.str());
}

double integrate(TestFunction const& s, Mask const& m)
{
    GridSpec const& g = m.grid();
    if (s.family() == TestFamily::newton && m.count() > 0
        && pole_distance(m, *s.pole()) < 0.5 * g.h())
    {
        throw ConfigError("integrate: the pole of " + s.id()
                          + " lies inside the mask");
    }
    std::vector<double> v;
    v.reserve(m.count());
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        if (m[i])
            v.push_back(s(g.center(i)));
    }
    return pairwise_sum(v) * g.cell_volume();
}

double integrate(TestFunction const& s, DensityField const& w)
{
    GridSpec const& g = w.grid();
    if (s.family() == TestFamily::newton)
    {
        Mask const supp = w.support();
        if (supp.count() > 0 && pole_distance(supp, *s.pole()) < 0.5 * g.h())
        {
            throw ConfigError("integrate: the pole of " + s.id()
                              + " lies inside the weight's support");
        }
    }
    std::vector<double> v;
    v.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        if (w[i] != 0)
            v.push_back(w[i] * s(g.center(i)));
    }
    return pairwise_sum(v) * g.cell_volume();
}

double quadrature_slack(Mask const& domain, DensityField const& w, TestFunction const& s)
{
    require_same_grid(domain.grid(), w.grid(), "quadrature_slack");
    s.require_domain(domain | w.support());
    return integrate(s, w) - integrate(s, domain);
}

double slack_tolerance(Mask const& domain, DensityField const& w, TestFunction const& s)
{
    require_same_grid(domain.grid(), w.grid(), "slack_tolerance");
    GridSpec const& g = domain.grid();
    Mask const cells = domain | w.support();
    double sup = 0;
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        if (cells[i])
            sup = std::max(sup, std::abs(s(g.center(i))));
    }
    return sup * static_cast<double>(boundary_cell_count(domain)) * g.cell_volume();
}

double cubic_average(std::function<double(Point const&)> const& f,
                     int dim,
                     Point const& x,
                     Point const& y)
{
    auto const group = cubic_isometries(dim);
    Point rel{0, 0, 0};
    for (int i = 0; i < dim; ++i)
        rel[i] = y[i] - x[i];
    std::vector<double> v;
    v.reserve(group.size());
    for (auto const& u : group)
    {
        Point const img = u.apply(rel);
        Point p{0, 0, 0};
        for (int i = 0; i < dim; ++i)
            p[i] = x[i] + img[i];
        v.push_back(f(p));
    }
    return pairwise_sum(v) / static_cast<double>(v.size());
}

double second_moment(Mask const& m, Point const& about)
{
    GridSpec const& g = m.grid();
    std::vector<double> v;
    v.reserve(m.count());
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        if (m[i])
        {
            double const r = distance(g.center(i), about, g.dim());
            v.push_back(r * r);
        }
    }
    return pairwise_sum(v) * g.cell_volume();
}

Point centroid(Mask const& m)
{
    GridSpec const& g = m.grid();
    Point c{0, 0, 0};
    std::size_t const n = m.count();
    if (n == 0)
        return c;
    for (int a = 0; a < g.dim(); ++a)
    {
        std::vector<double> v;
        v.reserve(n);
        for (std::size_t i = 0; i < m.size(); ++i)
        {
            if (m[i])
                v.push_back(g.center(i)[a]);
        }
        c[a] = pairwise_sum(v) / static_cast<double>(n);
    }
    return c;
}

double analytic_cs_beyond(TestFunction const& s, double dist)
{
    switch (s.family())
    {
        case TestFamily::constant:
        case TestFamily::coordinate:
        case TestFamily::neg_square:
            return 0;
        case TestFamily::newton:
        {
            if (!(dist > 0))
                return std::numeric_limits<double>::infinity();
            return 0.5 * radial_d3_bound(s.radial(dist), dist, s.dim());
        }
        case TestFamily::mollified_newton:
        {
            // Beyond rho the bound decreases with r; inside, sample the
            // polynomial profile and pad the maximum.
            double const start = std::max(dist, 0.0);
            double best = 0;
            if (start < s.rho())
            {
                int const samples = 2048;
                double const step = (s.rho() - start) / samples;
                for (int k = 0; k <= samples; ++k)
                {
                    double const r = std::max(start + k * step, 1e-12 * s.rho());
                    best = std::max(best, radial_d3_bound(s.radial(r), r, s.dim()));
                }
                best *= 1.05;
            }
            double const outer = std::max(start, s.rho());
            best = std::max(best, radial_d3_bound(s.radial(outer), outer, s.dim()));
            return 0.5 * best;
        }
        case TestFamily::custom:
            break;
    }
    throw ConfigError("analytic_cs_beyond: no closed form for " + s.id());
}

double fd_cs(TestFunction const& s, Mask const& region)
{
    GridSpec const& g = region.grid();
    int const d = g.dim();
    double const k = g.h();

    // Axis and diagonal directions.
    std::vector<Point> dirs;
    for (int a = 0; a < d; ++a)
    {
        Point e{0, 0, 0};
        e[a] = 1;
        dirs.push_back(e);
    }
    for (int a = 0; a < d; ++a)
    {
        for (int b = a + 1; b < d; ++b)
        {
            for (double sg : {1.0, -1.0})
            {
                Point e{0, 0, 0};
                e[a] = std::sqrt(0.5);
                e[b] = sg * std::sqrt(0.5);
                dirs.push_back(e);
            }
        }
    }
    double best = 0;
    for (std::size_t i = 0; i < region.size(); ++i)
    {
        if (!region[i])
            continue;
        Point const y = g.center(i);
        for (auto const& e : dirs)
        {
            auto at = [&](double t) {
                Point p = y;
                for (int a = 0; a < d; ++a)
                    p[a] += t * e[a];
                return s(p);
            };
            double const d3
                = (at(2 * k) - 2 * at(k) + 2 * at(-k) - at(-2 * k)) / (2 * k * k * k);
            best = std::max(best, std::abs(d3));
        }
    }
    // c_s = (1/2) sup|D^3| times the safety factor 2.
    return best;
}

double estimate_cs(TestFunction const& s, Mask const& region)
{
    if (!s.analytic_cs())
        return fd_cs(s, region);
    if (s.pole())
        return analytic_cs_beyond(s, pole_distance(region, *s.pole()));
    return analytic_cs_beyond(s, 0);
}

double discrete_laplacian(TestFunction const& s, Point const& y, double h)
{
    double const c = s(y);
    std::vector<double> v;
    for (int a = 0; a < s.dim(); ++a)
    {
        for (double sg : {1.0, -1.0})
        {
            Point p = y;
            p[a] += sg * h;
            v.push_back(s(p) - c);
        }
    }
    return pairwise_sum(v) / (h * h);
}

MomentLedger moments_of(Mask const& m, TestFunction const& s)
{
    return {m.measure(), integrate(s, m), second_moment(m)};
}

SlackRecord check_slack(Mask const& domain, DensityField const& w, TestFunction const& s)
{
    SlackRecord r;
    r.id = s.id();
    r.slack = quadrature_slack(domain, w, s);
    r.tolerance = slack_tolerance(domain, w, s);
    Mask const cells = domain | w.support().regrid(domain.grid());
    r.harmonic = s.harmonic_on(cells);
    r.pass = r.slack >= -r.tolerance && (!r.harmonic || r.slack <= r.tolerance);
    return r;
}

std::vector<TestFunction> standard_test_functions(Mask const& region)
{
    GridSpec const& g = region.grid();
    int const d = g.dim();
    double const h = g.h();
    Point const c = centroid(region);
    double reach = 0;
    for (std::size_t i = 0; i < region.size(); ++i)
    {
        if (!region[i])
            continue;
        Point const y = g.center(i);
        double q = 0;
        for (int a = 0; a < d; ++a)
            q += (y[a] - c[a]) * (y[a] - c[a]);
        reach = std::max(reach, std::sqrt(q));
    }
    auto at = [&](double dx, double dy) {
        Point p = c;
        p[0] += dx;
        if (d > 1)
            p[1] += dy;
        return p;
    };
    double const out = reach + 0.5 + 8 * h;
    std::vector<TestFunction> fns{
        TestFunction::constant(d, 1),
        TestFunction::constant(d, -1),
        TestFunction::coordinate(d, 0, 1),
        TestFunction::coordinate(d, 0, -1),
        TestFunction::neg_square(d, c),
        TestFunction::newton(d, at(out, 0), 1),
        TestFunction::newton(d, at(out, 0), -1),
        TestFunction::newton(d, at(-0.6 * out, d > 1 ? -0.8 * out : 0), 1),
        TestFunction::newton(d, at(-0.6 * out, d > 1 ? -0.8 * out : 0), -1),
        TestFunction::mollified_newton(d, c, 8 * h),
        TestFunction::mollified_newton(d, at(0.3 * reach, d > 1 ? 0.2 * reach : 0), 8 * h),
    };
    return fns;
}

}  // namespace smashlab
