// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,2,...] [--known-failures 10]
//
// Known failures still print FAIL; they only stop counting toward the exit
// status.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smashlab/axioms.hpp"
#include "smashlab/geometry.hpp"
#include "smashlab/quadrature.hpp"
#include "smashlab/sandpile.hpp"
#include "smashlab/scene.hpp"
#include "smashlab/smashgame.hpp"

using namespace smashlab;

namespace {

using Clock = std::chrono::steady_clock;
constexpr double pi = std::numbers::pi;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict
{
    bool pass = false;
    std::string detail;
};

//! Relative mass drift of every sum run here, for the conservation line.
std::vector<std::pair<std::string, double>> g_drifts;

SumResult tracked_sum(std::string const& label, std::vector<Mask> const& parts,
                      StabilizeParams const& params = {})
{
    SumResult r = smash_masks(parts, params);
    g_drifts.emplace_back(label, std::abs(r.final_mass - r.initial_mass) / r.initial_mass);
    return r;
}

double norm(Point const& p, int dim)
{
    double q = 0;
    for (int a = 0; a < dim; ++a)
        q += p[a] * p[a];
    return std::sqrt(q);
}

//! Cells of the domain grid whose centers lie in the open ball.
Mask oracle_ball(GridSpec const& g, double radius)
{
    Mask m(g);
    for (std::size_t i = 0; i < m.size(); ++i)
        m.set(i, norm(g.center(i), g.dim()) < radius);
    return m;
}

std::string str(double v, int precision = 4)
{
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

Verdict concentric_law()
{
    Verdict out{true, ""};
    std::ostringstream detail;
    auto run = [&](int dim, double h) {
        auto const t0 = Clock::now();
        ShapeExpr const ball = make_ball(dim, {0, 0, 0}, 1);
        std::vector<ShapeExpr> const shapes{ball, ball};
        GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
        Mask const mb = rasterize(ball, g);
        SumResult const sum = tracked_sum("concentric d=" + std::to_string(dim), {mb, mb});
        double const radius = std::pow(2.0, 1.0 / dim);
        Mask const oracle = oracle_ball(sum.domain.grid(), radius);
        std::size_t const cells = symmetric_difference_count(sum.domain, oracle);
        return std::tuple{cells, static_cast<double>(cells) * g.cell_volume(), seconds_since(t0)};
    };
    for (auto [h, frac] : {std::pair{1.0 / 64, 0.02}, std::pair{1.0 / 128, 0.01}})
    {
        auto const [cells, meas, secs] = run(2, h);
        double const rel = meas / (2 * pi);
        bool const ok = rel <= frac && secs <= 60;
        out.pass = out.pass && ok;
        detail << "d=2 h=1/" << std::lround(1 / h) << " diff " << str(100 * rel, 3) << "% (<= "
               << 100 * frac << "%) " << str(secs, 3) << "s; ";
    }
    {
        auto const [cells, meas, secs] = run(1, 1.0 / 256);
        bool const ok = cells <= 2;
        out.pass = out.pass && ok;
        detail << "d=1 " << cells << " cells (<= 2); ";
    }
    {
        auto const [cells, meas, secs] = run(3, 1.0 / 16);
        double const rel = meas / (2 * 4 * pi / 3);
        bool const ok = rel <= 0.06;
        out.pass = out.pass && ok;
        detail << "d=3 h=1/16 diff " << str(100 * rel, 3) << "% (<= 6%)";
    }
    out.detail = detail.str();
    return out;
}

Verdict one_dim_moments()
{
    auto const t0 = Clock::now();
    double const h = 1.0 / 256;
    ShapeExpr const a = make_box(1, {0, 0, 0}, {2, 0, 0});
    ShapeExpr const b = make_box(1, {1, 0, 0}, {3, 0, 0});
    std::vector<ShapeExpr> const shapes{a, b};
    GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
    SumResult const sum = tracked_sum("interval pair", {rasterize(a, g), rasterize(b, g)});
    double const secs = seconds_since(t0);
    // An interval with the mass and first moment of the two inputs.
    double const mass = 2 + 2;
    double const mean = (2 * 1.0 + 2 * 2.0) / mass;
    double const lo = mean - mass / 2;
    double const hi = mean + mass / 2;
    Mask oracle(sum.domain.grid());
    for (std::size_t i = 0; i < oracle.size(); ++i)
    {
        double const x = oracle.grid().center(i)[0];
        oracle.set(i, x > lo && x < hi);
    }
    std::size_t const cells = symmetric_difference_count(sum.domain, oracle);
    std::ostringstream os;
    os << "oracle (" << lo << ", " << hi << "): " << cells << " cells off (<= 2), " << str(secs, 3)
       << "s (< 1s)";
    return {cells <= 2 && secs < 1, os.str()};
}

Verdict mass_conservation()
{
    for (auto const& sc : standard_scenes())
    {
        for (double h : {1.0 / 32, 1.0 / 64})
        {
            std::vector<ShapeExpr> const shapes{sc.a, sc.b};
            GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
            tracked_sum(sc.name, {rasterize(sc.a, g), rasterize(sc.b, g)});
        }
    }
    double worst = 0;
    std::string where;
    for (auto const& [label, drift] : g_drifts)
    {
        if (drift >= worst)
        {
            worst = drift;
            where = label;
        }
    }
    std::ostringstream os;
    os << g_drifts.size() << " runs, max relative drift " << worst << " (" << where << ", <= 1e-9)";
    return {worst <= 1e-9, os.str()};
}

bool harmonic_family(TestFunction const& s)
{
    switch (s.family())
    {
        case TestFamily::constant:
        case TestFamily::coordinate:
        case TestFamily::newton:
            return true;
        default:
            return false;
    }
}

Verdict quadrature_inequality()
{
    double const h = 1.0 / 64;
    bool pass = true;
    std::size_t functions = 0;
    std::size_t harmonic = 0;
    std::size_t rows = 0;
    double worst_route = 0;
    std::set<std::string> poles;
    for (auto const& sc : standard_scenes())
    {
        std::vector<ShapeExpr> const shapes{sc.a, sc.b};
        GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
        Mask const a = rasterize(sc.a, g);
        Mask const b = rasterize(sc.b, g);
        SumResult const sum = tracked_sum(sc.name + " quadrature", {a, b});
        DensityField w(sum.domain.grid());
        w.add(a.regrid(w.grid()));
        w.add(b.regrid(w.grid()));
        auto const fns = standard_test_functions(sum.domain);
        functions = std::max(functions, fns.size());
        GridSpec const& dg = sum.domain.grid();
        for (auto const& s : fns)
        {
            // Second route: the slack summed here cell by cell.
            double direct = 0;
            for (std::size_t i = 0; i < dg.size(); ++i)
                direct += s(dg.center(i)) * (w[i] - (sum.domain[i] ? 1.0 : 0.0));
            direct *= dg.cell_volume();
            double const lib = quadrature_slack(sum.domain, w, s);
            worst_route = std::max(worst_route, std::abs(direct - lib) / std::max(1.0, std::abs(lib)));
            double const tol = slack_tolerance(sum.domain, w, s);
            bool ok = direct >= -tol;
            if (harmonic_family(s))
            {
                ok = ok && std::abs(direct) <= tol;
                ++harmonic;
            }
            if (s.pole())
                poles.insert(str((*s.pole())[0]) + "," + str((*s.pole())[1]));
            pass = pass && ok;
            ++rows;
        }
    }
    pass = pass && functions >= 6 && worst_route <= 1e-9;
    std::ostringstream os;
    os << functions << " functions x 3 scenes at h=1/64, " << harmonic << " harmonic rows, "
       << poles.size() << " pole positions, routes agree to " << worst_route;
    return {pass, os.str()};
}

Verdict cubic_average_exactness()
{
    std::mt19937 rng(20260415);
    std::uniform_real_distribution<double> u(-2, 2);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial)
    {
        int const d = 1 + trial % 3;
        double const c0 = u(rng);
        Point const grad{u(rng), u(rng), u(rng)};
        double q[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j <= i; ++j)
                q[i][j] = q[j][i] = u(rng);
        auto p = [&](Point const& y) {
            double v = c0;
            for (int i = 0; i < d; ++i)
            {
                v += grad[i] * y[i];
                for (int j = 0; j < d; ++j)
                    v += 0.5 * q[i][j] * y[i] * y[j];
            }
            return v;
        };
        Point const y{u(rng), u(rng), u(rng)};
        double lap = 0;
        double r2 = 0;
        for (int i = 0; i < d; ++i)
        {
            lap += q[i][i];
            r2 += y[i] * y[i];
        }
        double const expected = c0 + lap * r2 / (2 * d);
        worst = std::max(worst, std::abs(cubic_average(p, d, {0, 0, 0}, y) - expected));
    }
    return {worst <= 1e-12, "100 quadratics in d=1..3, max error " + str(worst, 3) + " (<= 1e-12)"};
}

Verdict second_moment_formula()
{
    double const h = 1.0 / 128;
    GridSpec const g = GridSpec::covering(2, h, {-1.5, -1.5, 0}, {1.5, 1.5, 0});
    Mask const disk = rasterize(make_ball(2, {0, 0, 0}, 1), g);
    double const m2 = second_moment(disk);
    double const rel = std::abs(m2 - pi / 2) / (pi / 2);

    Mask const off = rasterize(make_ball(2, {0.3, -0.2, 0}, 1), g);
    Point const c = centroid(off);
    double const lhs = second_moment(off);
    double const rhs = (c[0] * c[0] + c[1] * c[1]) * off.measure() + second_moment(off, c);
    double const gap = std::abs(lhs - rhs);
    std::ostringstream os;
    os << "B_1 at h=1/128: " << str(m2, 8) << " vs pi/2, " << str(100 * rel, 3)
       << "% (<= 1%); parallel axis gap " << str(gap, 3) << " (<= 1e-12)";
    return {rel <= 0.01 && gap <= 1e-12, os.str()};
}

Verdict abelian_property()
{
    double const h = 1.0 / 32;
    bool pass = true;
    double worst = 0;
    std::size_t cells = 0;
    for (auto const& sc : standard_scenes())
    {
        std::vector<ShapeExpr> const shapes{sc.a, sc.b};
        GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
        std::vector<Mask> const parts{rasterize(sc.a, g), rasterize(sc.b, g)};
        DensityField const w = indicator_sum(parts);
        for (auto other : {SweepOrder::forward_lex, SweepOrder::backward_lex})
        {
            StabilizeParams pa;
            StabilizeParams pb;
            pa.order = SweepOrder::jacobi;
            pb.order = other;
            AbelianReport const rep = abelian_check(w, pa, pb, 1e-8);
            worst = std::max(worst, rep.odometer_sup_diff);
            cells += rep.domain_diff_cells;
            pass = pass && rep.odometer_sup_diff <= 1e-8 && rep.domain_diff_cells == 0;
        }
    }
    std::ostringstream os;
    os << "Jacobi vs forward/backward on 3 scenes at h=1/32: odometer sup diff " << worst
       << " (<= 1e-8), " << cells << " domain cells differ";
    return {pass, os.str()};
}

Verdict axiom_suite()
{
    SuiteOptions opts;
    opts.h = {1.0 / 64};
    auto const reports = run_axiom_suite(standard_scenes(), opts);
    bool pass = true;
    std::map<std::string, std::size_t> exact;
    double worst_ratio = 0;
    std::size_t failures = 0;
    for (auto const& r : reports)
    {
        bool ok = r.pass;
        if (r.name == "commute" || r.name == "translate" || r.name == "isometry")
        {
            exact[r.name] += r.cells;
            ok = ok && r.cells == 0;
        }
        if (r.name == "monotone" || r.name == "inflation")
            ok = ok && r.cells <= r.tolerance_cells;
        if (r.name == "associate_refinement")
        {
            worst_ratio = std::max(worst_ratio, r.value);
            ok = ok && r.value <= 0.7;
        }
        if (!ok)
        {
            ++failures;
            std::printf("    axiom %s on %s failed: %zu cells (tol %zu), value %g\n", r.name.c_str(),
                        r.scene.c_str(), r.cells, r.tolerance_cells, r.value);
        }
        pass = pass && ok;
    }
    std::ostringstream os;
    os << reports.size() << " checks at h=1/64; exact cells commute " << exact["commute"]
       << ", translate " << exact["translate"] << ", isometry " << exact["isometry"]
       << "; associativity ratio max " << str(worst_ratio, 3) << " (<= 0.7); " << failures
       << " failing";
    return {pass, os.str()};
}

Verdict diameter_bound()
{
    bool pass = true;
    std::ostringstream os;
    for (auto [dim, h] : {std::pair{1, 1.0 / 256}, std::pair{2, 1.0 / 64}, std::pair{3, 1.0 / 16}})
    {
        ShapeExpr const ball = make_ball(dim, {0, 0, 0}, 1);
        std::vector<ShapeExpr> const shapes{ball, ball};
        GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
        Mask const mb = rasterize(ball, g);
        SumResult const sum = tracked_sum("diameter d=" + std::to_string(dim), {mb, mb});
        double const nd = 2 / (std::pow(9.0 / 8, 1.0 / dim) - 1);
        double outer = 0;
        for (std::size_t i = 0; i < sum.domain.size(); ++i)
        {
            if (sum.domain[i])
                outer = std::max(outer, norm(sum.domain.grid().center(i), dim));
        }
        double const target = std::pow(2.0, 1.0 / dim);
        double const rel = std::abs(outer - target) / target;
        AxiomReport const lib = check_diameter(dim, 1, h);
        bool const ok = outer < nd && rel <= 0.03 && std::abs(lib.value - outer) <= 1e-12 && lib.pass;
        pass = pass && ok;
        os << "d=" << dim << " outer " << str(outer) << " vs " << str(target) << " (" << str(100 * rel, 2)
           << "%), N_d " << str(nd) << "; ";
    }
    return {pass, os.str()};
}

struct GameRun
{
    bool ran = false;
    GameResult result;
    double seconds = 0;
    std::string error;
};

GameRun& game_run()
{
    static GameRun run;
    if (run.ran)
        return run;
    run.ran = true;
    auto const t0 = Clock::now();
    auto const scene = standard_scenes()[1];  // overlapping unit disks
    GameOptions opts;
    opts.eps = 0.05;
    opts.delta = 100;
    opts.throw_on_grid_floor = false;
    try
    {
        run.result = run_strategy(scene.a, scene.b,
                                  TestFunction::mollified_newton(2, {1000, 0, 0}, 0.25), 1.0 / 128,
                                  opts);
    }
    catch (std::exception const& e)
    {
        run.error = e.what();
    }
    run.seconds = seconds_since(t0);
    return run;
}

Verdict smash_game()
{
    GameRun const& run = game_run();
    if (!run.error.empty())
        return {false, "error: " + run.error};
    GameResult const& r = run.result;
    StrategyParams const& p = r.params;
    int const d = p.dim;
    double const group = cubic_group_order(d);
    double const bound = std::ceil((d + 2) * (p.sigma_b + group * p.delta * p.lambda_b) / p.eps);
    bool corollary = true;
    for (auto const& rr : r.rounds_log)
        corollary = corollary && rr.corollary_lhs >= (1 - 0.1) * rr.corollary_rhs;
    bool const won = r.outcome == smashlab::Outcome::won;
    bool const pass = won && r.final_hand_mass < 0.05 && r.s_increase < 0.05 && r.mass_loss < 0.05
                      && corollary && r.rounds <= bound && run.seconds <= 600;
    std::ostringstream os;
    os << to_string(r.outcome) << " after " << r.rounds << " rounds (M = " << bound << ")";
    if (!r.reason.empty())
        os << " [" << r.reason << "]";
    os << "; hand " << str(r.final_hand_mass) << ", s increase " << str(r.s_increase, 3)
       << ", mass loss " << str(r.mass_loss, 3) << ", corollary " << (corollary ? "ok" : "violated")
       << ", " << str(run.seconds, 3) << "s";
    return {pass, os.str()};
}

std::vector<MoveRecord> cookie_smashes(GameResult const& r)
{
    std::vector<MoveRecord> out;
    for (auto const& m : r.moves)
    {
        if (m.kind == MoveKind::cookie_smash)
            out.push_back(m);
    }
    return out;
}

Verdict lyapunov_per_move()
{
    GameRun const& run = game_run();
    if (!run.error.empty())
        return {false, "error: " + run.error};
    auto const moves = cookie_smashes(run.result);
    int const d = run.result.params.dim;
    double const group = cubic_group_order(d);
    std::size_t bad = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (auto const& m : moves)
    {
        double const R = m.radius;
        double const lhs = m.sigma_change + group * R * R * m.nu;
        double const rhs = 0.9 * (2.0 / (d + 2)) * R * R * m.mu;
        worst = std::min(worst, rhs > 0 ? lhs / rhs : 1.0);
        bad += lhs < rhs;
    }
    std::ostringstream os;
    os << moves.size() << " cookie smashes, " << bad << " violations";
    if (!moves.empty())
        os << ", min lhs/rhs " << str(worst);
    return {bad == 0 && !moves.empty(), os.str()};
}

Verdict lemma_x_per_move()
{
    GameRun const& run = game_run();
    if (!run.error.empty())
        return {false, "error: " + run.error};
    auto const moves = cookie_smashes(run.result);
    StrategyParams const& p = run.result.params;
    double const cs_big = 2 * p.N * p.N * p.N * p.cs;
    std::size_t bad = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (auto const& m : moves)
    {
        double const R = m.radius;
        double const main_term = cs_big * R * R * R * m.mu;
        double const tol = m.lemma_x_bound - main_term;
        bool const ok = tol >= 0 && m.s_change <= main_term + tol;
        bad += !ok;
        worst_margin = std::min(worst_margin, main_term + tol - m.s_change);
    }
    std::ostringstream os;
    os << moves.size() << " cookie smashes, C_s = " << str(cs_big, 3) << ", " << bad << " violations";
    if (!moves.empty())
        os << ", min margin " << str(worst_margin, 3);
    return {bad == 0 && !moves.empty(), os.str()};
}

std::set<int> parse_ids(std::string const& text)
{
    std::set<int> ids;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        if (!item.empty())
            ids.insert(std::stoi(item));
    }
    return ids;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"smashlab acceptance run"};
    std::string only;
    std::string known;
    app.add_option("--only", only, "comma-separated criteria to run");
    app.add_option("--known-failures", known,
                   "criteria reported as FAIL without failing the exit status");
    CLI11_PARSE(app, argc, argv);

    std::vector<std::pair<std::string, std::function<Verdict()>>> const criteria{
        {"concentric-ball law", concentric_law},
        {"1D moment oracle", one_dim_moments},
        {"mass conservation", mass_conservation},
        {"quadrature inequality", quadrature_inequality},
        {"cubic average exactness", cubic_average_exactness},
        {"second-moment formula", second_moment_formula},
        {"abelian property", abelian_property},
        {"axiom suite", axiom_suite},
        {"diameter bound", diameter_bound},
        {"smash game end to end", smash_game},
        {"per-move Lyapunov", lyapunov_per_move},
        {"lemma x bound", lemma_x_per_move},
    };
    std::set<int> const selected = only.empty() ? std::set<int>{} : parse_ids(only);
    std::set<int> const expected_fail = parse_ids(known);

    // Conservation is judged over every sum in the run, so it goes last.
    std::vector<int> order;
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i)
    {
        if (i != 3)
            order.push_back(i);
    }
    order.push_back(3);

    std::map<int, std::pair<Verdict, double>> results;
    for (int id : order)
    {
        if (!selected.empty() && !selected.count(id))
            continue;
        auto const t0 = Clock::now();
        Verdict o;
        try
        {
            o = criteria[id - 1].second();
        }
        catch (std::exception const& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        results[id] = {o, seconds_since(t0)};
    }

    int failed = 0;
    int excused = 0;
    for (auto const& [id, entry] : results)
    {
        auto const& [o, secs] = entry;
        bool const known_fail = expected_fail.count(id) > 0;
        std::printf("%s criterion %2d  %-26s %s (%.1fs)%s\n", o.pass ? "PASS" : "FAIL", id,
                    criteria[id - 1].first.c_str(), o.detail.c_str(), secs,
                    !o.pass && known_fail ? "  [known failure]" : "");
        if (!o.pass)
            (known_fail ? excused : failed) += 1;
    }
    std::printf("%zu criteria: %zu pass, %d fail, %d known failures\n", results.size(),
                results.size() - failed - excused, failed, excused);
    return failed == 0 ? 0 : 1;
}
