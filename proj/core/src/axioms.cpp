// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smashlab/axioms.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "smashlab/errors.hpp"

namespace smashlab {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

GridSpec grid_for(std::vector<ShapeExpr> const& shapes, double h, long extra = 0)
{
    if (!(h > 0))
        throw ConfigError("axioms: h must be positive");
    GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
    return extra > 0 ? g.window(g.box().expanded(extra, g.dim())) : g;
}

Mask sum_of(std::vector<Mask> const& parts, StabilizeParams const& solver)
{
    return smash_masks(parts, solver).domain;
}

//! Both masks on the hull of their windows.
std::pair<Mask, Mask> on_common(Mask const& a, Mask const& b)
{
    GridSpec const g = a.grid().window(a.grid().box().hull(b.grid().box(), a.grid().dim()));
    return {a.regrid(g), b.regrid(g)};
}

Mask symmetric_difference(Mask const& a, Mask const& b)
{
    return (a - b) | (b - a);
}

std::size_t boundary_cells(std::initializer_list<Mask const*> masks)
{
    std::size_t n = 0;
    for (auto const* m : masks)
        n += boundary_cell_count(*m);
    return n;
}

AxiomReport start(std::string name, double h, std::string inputs = {})
{
    AxiomReport r;
    r.name = std::move(name);
    r.h = h;
    r.inputs = std::move(inputs);
    return r;
}

std::string describe(Index const& v, int dim)
{
    std::ostringstream os;
    os << "(";
    for (int a = 0; a < dim; ++a)
        os << (a ? "," : "") << v[a];
    os << ")";
    return os.str();
}

//! Same cells on the window moved by v.
Mask moved(Mask const& m, Index const& v)
{
    GridSpec const& g = m.grid();
    IndexBox b = g.box();
    for (int a = 0; a < g.dim(); ++a)
    {
        b.lo[a] += v[a];
        b.hi[a] += v[a];
    }
    Mask out(GridSpec(g.dim(), g.h(), g.origin(), b));
    std::copy(m.cells().begin(), m.cells().end(), out.cells().begin());
    return out;
}

}  // namespace

void AxiomReport::finish()
{
    pass = cells <= tolerance_cells && (std::isnan(limit) || value <= limit);
}

AxiomReport check_mass(ShapeExpr const& a,
                       ShapeExpr const& b,
                       double h,
                       StabilizeParams const& solver)
{
    auto const t0 = Clock::now();
    AxiomReport r = start("mass", h);
    GridSpec const g = grid_for({a, b}, h);
    Mask const ma = rasterize(a, g);
    Mask const mb = rasterize(b, g);
    SumResult const sum = smash_masks(std::vector<Mask>{ma, mb}, solver);
    double const vol = g.cell_volume();
    r.measure = std::abs(sum.domain.measure() - ma.measure() - mb.measure());
    r.cells = static_cast<std::size_t>(std::llround(r.measure / vol));
    r.tolerance_cells = boundary_cells({&ma, &mb, &sum.domain});
    std::ostringstream os;
    os << "mass drift " << sum.mass_drift;
    r.note = os.str();
    r.finish();
    r.seconds = since(t0);
    return r;
}

AxiomReport check_monotone(ShapeExpr const& a,
                           ShapeExpr const& b,
                           ShapeExpr const& c,
                           double h,
                           StabilizeParams const& solver)
{
    auto const t0 = Clock::now();
    AxiomReport r = start("monotone", h);
    GridSpec const g = grid_for({a, b, c}, h);
    Mask const ma = rasterize(a, g);
    Mask const mb = rasterize(b, g);
    Mask const mc = rasterize(c, g);
    if (!ma.subset_of(mb))
        throw ConfigError("monotone: A is not contained in B");
    Mask const ac = sum_of({ma, mc}, solver);
    Mask const bc = sum_of({mb, mc}, solver);
    auto const [lhs, rhs] = on_common(ac, bc);
    std::size_t const outside = difference_count(lhs, rhs);
    r.diff = lhs - rhs;
    auto const [a_on, ac_on] = on_common(ma, ac);
    auto const [b_on, bc_on] = on_common(mb, bc);
    std::size_t const lost = difference_count(a_on, ac_on) + difference_count(b_on, bc_on);
    r.cells = outside;
    r.measure = static_cast<double>(outside) * g.cell_volume();
    r.tolerance_cells = 3 * boundary_cells({&ma, &mb, &mc});
    r.value = static_cast<double>(lost);
    r.limit = 0;
    r.note = "value = cells of A, B missing from A ⊕ C, B ⊕ C";
    r.finish();
    r.seconds = since(t0);
    return r;
}

AxiomReport check_commute(ShapeExpr const& a,
                          ShapeExpr const& b,
                          double h,
                          StabilizeParams const& solver)
{
    auto const t0 = Clock::now();
    AxiomReport r = start("commute", h);
    GridSpec const g = grid_for({a, b}, h);
    Mask const ma = rasterize(a, g);
    Mask const mb = rasterize(b, g);
    auto const [ab, ba] = on_common(sum_of({ma, mb}, solver), sum_of({mb, ma}, solver));
    r.cells = symmetric_difference_count(ab, ba);
    r.diff = symmetric_difference(ab, ba);
    r.measure = static_cast<double>(r.cells) * g.cell_volume();
    r.tolerance_cells = 0;
    r.finish();
    r.seconds = since(t0);
    return r;
}

AxiomReport check_associate(ShapeExpr const& a,
                            ShapeExpr const& b,
                            ShapeExpr const& c,
                            double h,
                            StabilizeParams const& solver)
{
    auto const t0 = Clock::now();
    AxiomReport r = start("associate", h);
    GridSpec const g = grid_for({a, b, c}, h);
    Mask const ma = rasterize(a, g);
    Mask const mb = rasterize(b, g);
    Mask const mc = rasterize(c, g);
    Mask const left = sum_of({sum_of({ma, mb}, solver), mc}, solver);
    Mask const right = sum_of({ma, sum_of({mb, mc}, solver)}, solver);
    auto const [l, rr] = on_common(left, right);
    r.cells = symmetric_difference_count(l, rr);
    r.diff = symmetric_difference(l, rr);
    r.measure = static_cast<double>(r.cells) * g.cell_volume();
    r.tolerance_cells = 3 * boundary_cells({&ma, &mb, &mc});
    r.finish();
    r.seconds = since(t0);
    return r;
}

AxiomReport check_associate_refinement(ShapeExpr const& a,
                                       ShapeExpr const& b,
                                       ShapeExpr const& c,
                                       double h,
                                       double max_ratio,
                                       StabilizeParams const& solver)
{
    auto const t0 = Clock::now();
    AxiomReport const coarse = check_associate(a, b, c, h, solver);
    AxiomReport const fine = check_associate(a, b, c, h / 2, solver);
    AxiomReport r = start("associate_refinement", h);
    r.cells = fine.cells;
    r.measure = fine.measure;
    r.tolerance_cells = fine.tolerance_cells;
    if (coarse.measure > 0)
        r.value = fine.measure / coarse.measure;
    else
        r.value = fine.measure > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    r.limit = max_ratio;
    std::ostringstream os;
    os << "discrepancy " << coarse.measure << " at h, " << fine.measure
       << " at h/2 (empirical target)";
    r.note = os.str();
    r.finish();
    r.seconds = since(t0);
    return r;
}

AxiomReport check_translate(ShapeExpr const& a,
                            ShapeExpr const& b,
                            Index const& v,
                            double h,
                            StabilizeParams const& solver)
{
    auto const t0 = Clock::now();
    GridSpec const g = grid_for({a, b}, h);
    AxiomReport r = start("translate", h, "v = " + describe(v, g.dim()) + " cells");
    Mask const ma = rasterize(a, g);
    Mask const mb = rasterize(b, g);
    Mask const sum = sum_of({ma, mb}, solver);
    Mask const shifted = sum_of({moved(ma, v), moved(mb, v)}, solver);
    auto count_missing = [](Mask const& from, Mask const& in, Index const& by) {
        GridSpec const& fg = from.grid();
        std::size_t n = 0;
        for (std::size_t i = 0; i < from.size(); ++i)
        {
            if (!from[i])
                continue;
            Index k = fg.index(i);
            for (int ax = 0; ax < 3; ++ax)
                k[ax] += by[ax];
            if (!in.at(k))
                ++n;
        }
        return n;
    };
    Index const back{-v[0], -v[1], -v[2]};
    r.cells = count_missing(sum, shifted, v) + count_missing(shifted, sum, back);
    r.measure = static_cast<double>(r.cells) * g.cell_volume();
    r.tolerance_cells = 0;
    r.finish();
    r.seconds = since(t0);
    return r;
}

AxiomReport check_isometry(ShapeExpr const& a,
                           ShapeExpr const& b,
                           std::vector<IsometryElem> const& elements,
                           double h,
                           StabilizeParams const& solver)
{
    auto const t0 = Clock::now();
    GridSpec const g = grid_for({a, b}, h);
    std::ostringstream in;
    in << elements.size() << " elements about the cell center nearest the origin";
    AxiomReport r = start("isometry", h, in.str());
    Point const x = g.center(g.cell_containing(Point{0, 0, 0}));
    Mask const ma = rasterize(a, g);
    Mask const mb = rasterize(b, g);
    Mask const sum = sum_of({ma, mb}, solver);
    for (auto const& u : elements)
    {
        Mask const image_sum = sum_of(
            {apply_isometry_about(ma, u, x), apply_isometry_about(mb, u, x)}, solver);
        auto const [l, rr] = on_common(image_sum, apply_isometry_about(sum, u, x));
        std::size_t const n = symmetric_difference_count(l, rr);
        if (n > 0 && r.cells == 0)
            r.diff = symmetric_difference(l, rr);
        r.cells += n;
    }
    r.measure = static_cast<double>(r.cells) * g.cell_volume();
    r.tolerance_cells = 0;
    r.finish();
    r.seconds = since(t0);
    return r;
}

AxiomReport check_inflation_inclusion(ShapeExpr const& a,
                                      ShapeExpr const& b,
                                      double eps,
                                      double h,
                                      StabilizeParams const& solver)
{
    auto const t0 = Clock::now();
    std::ostringstream in;
    in << "eps = " << eps;
    AxiomReport r = start("inflation", h, in.str());
    auto const pad = static_cast<long>(std::ceil(eps / h)) + 2;
    GridSpec const g = grid_for({a, b}, h, pad);
    Mask const ma = rasterize(a, g);
    Mask const mb = rasterize(b, g);
    Mask const sum = sum_of({ma, mb}, solver);
    Mask const grown = inflate(sum.regrid(sum.grid().window(sum.grid().box().expanded(pad, g.dim()))), eps);
    Mask const rhs = sum_of({inflate(ma, eps), inflate(mb, eps)}, solver);
    auto const [l, rr] = on_common(grown, rhs);
    r.cells = difference_count(l, rr);
    r.diff = l - rr;
    r.measure = static_cast<double>(r.cells) * g.cell_volume();
    r.tolerance_cells = 3 * boundary_cells({&ma, &mb});
    r.finish();
    r.seconds = since(t0);
    return r;
}

AxiomReport check_diameter(int dim, double r0, double h, StabilizeParams const& solver)
{
    auto const t0 = Clock::now();
    std::ostringstream in;
    in << "d = " << dim << ", r = " << r0;
    AxiomReport r = start("diameter", h, in.str());
    ShapeExpr const ball = make_ball(dim, {0, 0, 0}, r0);
    GridSpec const g = grid_for({ball, ball}, h);
    Mask const mb = rasterize(ball, g);
    Mask const sum = sum_of({mb, mb}, solver);
    double const bound = diameter_constant(dim) * r0;
    double outer = 0;
    for (std::size_t i = 0; i < sum.size(); ++i)
    {
        if (!sum[i])
            continue;
        Point const c = sum.grid().center(i);
        double q = 0;
        for (int ax = 0; ax < dim; ++ax)
            q += c[ax] * c[ax];
        q = std::sqrt(q);
        outer = std::max(outer, q);
        if (q >= bound)
            ++r.cells;
    }
    r.measure = static_cast<double>(r.cells) * g.cell_volume();
    r.tolerance_cells = 0;
    r.value = outer / r0;
    std::ostringstream os;
    os << "outer radius / r (expect 2^{1/d} = " << std::pow(2.0, 1.0 / dim)
       << "), bound N_d = " << diameter_constant(dim);
    r.note = os.str();
    r.finish();
    r.seconds = since(t0);
    return r;
}

AxiomReport check_disjoint(ShapeExpr const& a,
                           ShapeExpr const& b,
                           double h,
                           StabilizeParams const& solver)
{
    auto const t0 = Clock::now();
    AxiomReport r = start("disjoint", h);
    GridSpec const g = grid_for({a, b}, h);
    Mask const ma = rasterize(a, g);
    Mask const mb = rasterize(b, g);
    if ((ma & mb).count() != 0)
        throw ConfigError("disjoint: A and B overlap");
    auto const [s, u] = on_common(sum_of({ma, mb}, solver), ma | mb);
    r.cells = symmetric_difference_count(s, u);
    r.diff = symmetric_difference(s, u);
    r.measure = static_cast<double>(r.cells) * g.cell_volume();
    r.tolerance_cells = 0;
    r.finish();
    r.seconds = since(t0);
    return r;
}

std::vector<std::string> const& axiom_check_names()
{
    static std::vector<std::string> const names{"mass",
                                                "monotone",
                                                "commute",
                                                "associate",
                                                "associate_refinement",
                                                "translate",
                                                "isometry",
                                                "inflation",
                                                "diameter",
                                                "disjoint"};
    return names;
}

AxiomReport run_check(std::string const& name,
                      Scene const& sc,
                      double h,
                      SuiteOptions const& options)
{
    auto const& solver = options.solver;
    ShapeExpr const c = sc.c ? *sc.c : sc.b;
    AxiomReport r;
    if (name == "mass")
        r = check_mass(sc.a, sc.b, h, solver);
    else if (name == "monotone")
        r = check_monotone(make_intersection({sc.a, sc.b}), sc.a, c, h, solver);
    else if (name == "commute")
        r = check_commute(sc.a, sc.b, h, solver);
    else if (name == "associate")
        r = check_associate(sc.a, sc.b, c, h, solver);
    else if (name == "associate_refinement")
        r = check_associate_refinement(sc.a, sc.b, c, h, options.max_ratio, solver);
    else if (name == "translate")
        r = check_translate(sc.a, sc.b, Index{3, sc.dim > 1 ? 5 : 0, sc.dim > 2 ? -2 : 0}, h, solver);
    else if (name == "isometry")
    {
        auto group = cubic_isometries(sc.dim);
        group.erase(group.begin());  // identity
        r = check_isometry(sc.a, sc.b, group, h, solver);
    }
    else if (name == "inflation")
        r = check_inflation_inclusion(sc.a, sc.b, options.inflation_eps, h, solver);
    else if (name == "diameter")
        r = check_diameter(sc.dim, 1.0, h, solver);
    else if (name == "disjoint")
    {
        double const far = radius_about_origin(sc.a) + radius_about_origin(sc.b) + 0.5;
        r = check_disjoint(sc.a, make_translate(sc.b, Point{2 * far, 0, 0}), h, solver);
    }
    else
        throw ConfigError("axioms: unknown check '" + name + "'");
    r.scene = name == "diameter" ? "-" : sc.name;
    return r;
}

std::vector<AxiomReport> run_axiom_suite(std::vector<Scene> const& scenes,
                                         SuiteOptions const& options)
{
    auto const& known = axiom_check_names();
    for (auto const& c : options.checks)
    {
        if (std::find(known.begin(), known.end(), c) == known.end())
            throw ConfigError("axioms: unknown check '" + c + "'");
    }
    std::vector<std::string> const names = options.checks.empty() ? known : options.checks;
    std::vector<AxiomReport> out;
    for (double h : options.h)
    {
        std::vector<int> dims_done;
        for (auto const& sc : scenes)
        {
            for (auto const& name : names)
            {
                if (name == "diameter")
                {
                    if (std::find(dims_done.begin(), dims_done.end(), sc.dim) != dims_done.end())
                        continue;
                    dims_done.push_back(sc.dim);
                }
                out.push_back(run_check(name, sc, h, options));
            }
        }
    }
    return out;
}

}  // namespace smashlab
