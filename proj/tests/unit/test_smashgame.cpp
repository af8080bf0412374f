// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "smashlab/errors.hpp"
#include "smashlab/smashgame.hpp"

using namespace smashlab;

namespace {

constexpr double pi = std::numbers::pi;

//! Cell centers on hZ^2.
GridSpec lattice_grid(double h, double half)
{
    auto const n = static_cast<long>(std::ceil(half / h));
    IndexBox b;
    b.lo = {-n, -n, 0};
    b.hi = {n + 1, n + 1, 1};
    return GridSpec(2, h, {-h / 2, -h / 2, 0}, b);
}

Mask disk(GridSpec const& g, Point c, double r)
{
    return rasterize(make_ball(2, c, r), g);
}

TestFunction one()
{
    return TestFunction::constant(2, 1);
}

StrategyParams params_for(double delta)
{
    return StrategyParams::make(2, 0.05, delta, 0, 1, 1, 1);
}

}  // namespace

TEST(StrategyParams, Schedule)
{
    auto p = StrategyParams::make(2, 0.05, 2.0, 0.01, pi, pi, 2.0);
    double const n_d = diameter_constant(2);
    EXPECT_DOUBLE_EQ(p.Cs, 2 * n_d * n_d * n_d * 0.01);
    EXPECT_DOUBLE_EQ(p.sigma_b, 2 * pi * 4.0);
    for (int n : {1, 4, 100, 10000})
    {
        double const expect
            = std::min(2.0 / (2 * n_d), 0.05 / (6 * p.Cs * pi * std::sqrt(n)));
        EXPECT_DOUBLE_EQ(p.R(n), expect);
    }
    EXPECT_DOUBLE_EQ(p.eta(1), 0.05 / 4);
    EXPECT_DOUBLE_EQ(p.eta(3), 0.05 / 16);
    double const m = 4 * (p.sigma_b + 8 * 2.0 * pi) / 0.05;
    EXPECT_EQ(p.round_bound(), static_cast<long>(std::ceil(m)));
    EXPECT_DOUBLE_EQ(p.shrink_budget(1, 0.1, 1.0), std::min(0.05, 0.01 / 16.0) / 4);
}

TEST(StrategyParams, CubeSumBelowBudget)
{
    auto p = StrategyParams::make(2, 0.05, 2.0, 0.5, pi, pi, 2.0);
    double cubes = 0;
    double squares = 0;
    for (int n = 1; n <= 200000; ++n)
    {
        double const r = p.R(n);
        cubes += r * r * r;
        squares += r * r;
    }
    // Σ R_n^3 converges like Σ n^{-3/2}, whose total is below 2.62.
    EXPECT_LT(cubes, 2.62 * std::pow(0.05 / (6 * p.Cs * pi), 3));
    EXPECT_LT(cubes, 0.05 / (2 * p.Cs * pi));
    EXPECT_GT(squares, 12 * std::pow(0.05 / (6 * p.Cs * pi), 2));
}

TEST(StrategyParams, RejectsBadInput)
{
    EXPECT_THROW(StrategyParams::make(2, 0, 1, 0, 1, 1, 1), ConfigError);
    EXPECT_THROW(StrategyParams::make(2, 0.1, 0, 0, 1, 1, 1), ConfigError);
}

TEST(Move1, BallStaysOneBall)
{
    GridSpec const g = lattice_grid(1.0 / 64, 1.5);
    double const R = 0.5;
    Mask const b = disk(g, {0.25, 0, 0}, 0.9 * R);
    GameState st(Mask(g), {b}, one(), 0.05);
    auto rec = st.move1_split(0, 1, R, 1e-6, 2.0 / 64);
    ASSERT_EQ(st.hands().size(), 1u);
    EXPECT_EQ(rec.balls, 1u);
    EXPECT_EQ(st.hands()[0].set.tight(), b.tight());
    EXPECT_LT(st.hands()[0].radius, R);
    EXPECT_EQ(rec.mass_change, 0);
}

TEST(Move1, SquareMostlyCovered)
{
    GridSpec const g = lattice_grid(1.0 / 128, 1.0);
    Mask const sq = rasterize(make_box(2, {-0.5, -0.5, 0}, {0.5, 0.5, 0}), g);
    GameState st(Mask(g), {sq}, one(), 0.05);
    double const R = 0.3;
    // Cusps between balls thinner than 2h stay uncovered; at this h they hold
    // about 0.06, so the residual target is 0.075.
    auto rec = st.move1_split(0, 1, R, 0.075, 2.0 / 128);
    EXPECT_LT(-rec.mass_change, 0.075);
    EXPECT_GE(st.hand_mass(), 0.9 * sq.measure());
    EXPECT_LE(rec.s_change, 0);
    Mask seen(g);
    for (auto const& h : st.hands())
    {
        ASSERT_TRUE(h.center.has_value());
        EXPECT_LT(h.radius, R);
        Mask const on_g = h.set.regrid(g);
        EXPECT_EQ(difference_count(on_g, sq), 0u);
        EXPECT_EQ((on_g & seen).count(), 0u);
        EXPECT_EQ(on_g, ball_mask(g, *h.center, h.radius));
        seen |= on_g;
    }
}

TEST(Move1, DistantBallsUnchanged)
{
    GridSpec const g = lattice_grid(1.0 / 32, 3);
    Mask const b1 = disk(g, {-2, 0, 0}, 0.4);
    Mask const b2 = disk(g, {2, 0, 0}, 0.3);
    GameState st(Mask(g), {b1, b2}, one(), 0.05);
    auto rec = st.move1_split(0, 2, 0.5, 1e-6, 2.0 / 32);
    EXPECT_EQ(rec.balls, 2u);
    ASSERT_EQ(st.hands().size(), 2u);
    Mask both = b1 | b2;
    EXPECT_EQ(st.hands()[0].set.regrid(g) | st.hands()[1].set.regrid(g), both);
}

TEST(Move1, ThinStripIsTooCoarse)
{
    GridSpec const g = lattice_grid(1.0 / 32, 1);
    Mask const strip = rasterize(make_box(2, {-0.5, -0.01, 0}, {0.5, 0.04, 0}), g);
    ASSERT_GT(strip.count(), 0u);
    GameState st(Mask(g), {strip}, one(), 0.05);
    EXPECT_THROW(st.move1_split(0, 1, 0.2, 1e-4, 2.0 / 32), GridTooCoarse);
    EXPECT_EQ(st.hands()[0].set, strip.tight());
}

TEST(Move2, OneStepWhenBudgetAllows)
{
    GridSpec const g = lattice_grid(1.0 / 32, 1.5);
    Mask const a = disk(g, {0, 0, 0}, 1);
    auto const s = TestFunction::neg_square(2, {0, 0, 0}).shifted(-10);
    GameState st(a, {}, s, 0.05);
    double const loss = a.measure() - deflate(a, g.h()).measure();
    auto rec = st.move2_shrink(loss * 1.01);
    EXPECT_EQ(st.table(), deflate(a, g.h()));
    EXPECT_NEAR(-rec.mass_change, loss, 1e-12);
    EXPECT_LE(rec.s_change, 0);
    EXPECT_NEAR(st.current_mass(), st.table().measure(), 1e-12);
}

TEST(Move2, SmallBudgetKeepsTable)
{
    GridSpec const g = lattice_grid(1.0 / 32, 1.5);
    Mask const a = disk(g, {0, 0, 0}, 1);
    GameState st(a, {}, one(), 0.05);
    auto rec = st.move2_shrink(1e-3);
    EXPECT_EQ(st.table(), a);
    EXPECT_EQ(rec.mass_change, 0);
}

TEST(Move2, EmptyTable)
{
    GridSpec const g = lattice_grid(1.0 / 32, 1);
    GameState st(Mask(g), {}, one(), 0.05);
    st.move2_shrink(10);
    EXPECT_TRUE(st.table().empty());
}

TEST(Move3, EmptyStampKeepsHand)
{
    GridSpec const g = lattice_grid(1.0 / 32, 1.5);
    Mask const a = disk(g, {0, 0, 0}, 1);
    Mask const b = disk(g, {0.2, 0, 0}, 0.3);
    GameState st(a, {b}, one(), 0.05);
    st.move3_smash(0, Mask(g));
    EXPECT_EQ(st.hands()[0].set.regrid(g), b);
}

TEST(Move3, PressedOutsideTheStamp)
{
    GridSpec const g = lattice_grid(1.0 / 32, 1.5);
    Mask const a = disk(g, {0, 0, 0}, 0.6);
    Mask const b = disk(g, {0, 0, 0}, 0.3);
    GameState st(a, {b}, one(), 0.05);
    double const before = st.current_mass();
    auto rec = st.move3_smash(0, a);
    Mask const e = st.hands()[0].set.regrid(g);
    EXPECT_EQ(e.count(), b.count());
    EXPECT_EQ((e & a).count(), 0u);
    EXPECT_EQ(rec.mass_change, 0);
    EXPECT_EQ(st.current_mass(), before);
    // E hugs the stamp: every cell is within a few cells of a.
    Mask const near = inflate(a, 4 * g.h());
    EXPECT_EQ(difference_count(e, near), 0u);
    // The new set matches the sum minus the stamp up to its boundary layer.
    SumResult const sum = smash_pair(a, b);
    Mask const outer = sum.domain.cropped(g) - a;
    EXPECT_LE(symmetric_difference_count(e, outer),
              default_essential_tolerance(e, outer));
}

TEST(Move3, DistantHandUnchanged)
{
    GridSpec const g = lattice_grid(1.0 / 32, 3);
    Mask const a = disk(g, {-2, 0, 0}, 0.5);
    Mask const b = disk(g, {2, 0, 0}, 0.4);
    GameState st(a, {b}, one(), 0.05);
    st.move3_smash(0, a);
    EXPECT_EQ(st.hands()[0].set.regrid(g), b);
}

TEST(Move3, StampOutsideTableRejected)
{
    GridSpec const g = lattice_grid(1.0 / 32, 1.5);
    Mask const a = disk(g, {0, 0, 0}, 0.5);
    Mask const b = disk(g, {1, 0, 0}, 0.2);
    GameState st(a, {b}, one(), 0.05);
    EXPECT_THROW(st.move3_smash(0, disk(g, {0, 0, 0}, 0.8)), ConfigError);
}

TEST(Move4, InsideTableUnchanged)
{
    GridSpec const g = lattice_grid(1.0 / 32, 1.5);
    Mask const a = disk(g, {0, 0, 0}, 1);
    Mask const b = disk(g, {0.2, 0, 0}, 0.3);
    GameState st(a, {b}, one(), 0.05);
    auto rec = st.move4_deposit(0);
    EXPECT_EQ(st.table(), a);
    EXPECT_EQ(st.hands()[0].set.regrid(g), b);
    EXPECT_EQ(rec.hand_mass_change, 0);
}

TEST(Move4, DisjointMovesToTable)
{
    GridSpec const g = lattice_grid(1.0 / 32, 3);
    Mask const a = disk(g, {-1, 0, 0}, 0.5);
    Mask const b = disk(g, {1, 0, 0}, 0.5);
    GameState st(a, {b}, one(), 0.05);
    st.move4_deposit(0);
    EXPECT_EQ(st.table(), a | b);
    EXPECT_TRUE(st.hands().empty());
    EXPECT_EQ(st.outcome(), Outcome::won);
}

TEST(Move4, HalfOverlap)
{
    GridSpec const g = lattice_grid(1.0 / 64, 2);
    Mask const a = disk(g, {0, 0, 0}, 1);
    Mask const b = disk(g, {1, 0, 0}, 0.5);
    GameState st(a, {b}, TestFunction::coordinate(2, 0, 1), 0.05);
    double const s_before = st.s_integral();
    double const m_before = st.current_mass();
    auto rec = st.move4_deposit(0);
    EXPECT_NEAR(-rec.hand_mass_change, (b - a).measure(), 1e-12);
    EXPECT_EQ(st.hands()[0].set.regrid(g), a & b);
    EXPECT_NEAR(st.s_integral(), s_before, 1e-12);
    EXPECT_NEAR(st.current_mass(), m_before, 1e-12);
}

TEST(CookieSmash, CenterOfHugeBox)
{
    GridSpec const g = lattice_grid(1.0 / 64, 2);
    Mask const a = rasterize(make_box(2, {-1.5, -1.5, 0}, {1.5, 1.5, 0}), g);
    Mask const b = disk(g, {0, 0, 0}, 0.2);
    GameState st(a, {b}, one(), 0.05);
    st.move1_split(0, 1, 0.3, 1e-6, 2.0 / 64);
    ASSERT_EQ(st.hands().size(), 1u);
    auto const p = params_for(10);
    auto rec = st.cookie_smash(0, 0.6, p);
    EXPECT_EQ(rec.nu, 0);
    EXPECT_EQ(rec.s_change, 0);
    EXPECT_TRUE(rec.lyapunov_ok) << rec.lyapunov_lhs << " vs " << rec.lyapunov_rhs;
    EXPECT_GE(rec.sigma_change, 0.9 * rec.lyapunov_rhs);
    ASSERT_EQ(st.hands().size(), 1u);
    // E is an H-symmetric shell just outside B_R.
    Mask const e = st.hands()[0].set.regrid(g);
    for (auto const& u : cubic_isometries(2))
        EXPECT_LT(symmetric_difference_count(apply_isometry_about(e, u, {0, 0, 0}), e), 16u);
    Mask const core = disk(g, {0, 0, 0}, 0.6);
    EXPECT_EQ((e & core).count(), 0u);
    EXPECT_EQ(difference_count(e, disk(g, {0, 0, 0}, 0.7)), 0u);
}

TEST(CookieSmash, NearEdgeDeposits)
{
    GridSpec const g = lattice_grid(1.0 / 64, 2);
    Mask const a = disk(g, {0, 0, 0}, 1);
    Mask const b = disk(g, {0.75, 0, 0}, 0.125);
    auto const s = TestFunction::mollified_newton(2, {40, 0, 0}, 0.25);
    GameState st(a, {b}, s, 0.05);
    st.move1_split(0, 1, 0.5, 1e-6, 2.0 / 64);
    ASSERT_EQ(st.hands().size(), 1u);
    double const n_d = diameter_constant(2);
    auto p = StrategyParams::make(2, 0.05, 2 * n_d * 0.5 * 1.01,
                                  analytic_cs_beyond(s, 30), a.measure(), b.measure(), 1.5);
    double const before = st.current_mass();
    auto rec = st.cookie_smash(0, 0.5, p);
    EXPECT_GT(rec.nu, 0);
    EXPECT_NEAR(st.current_mass(), before, 1e-12);
    EXPECT_NEAR(rec.mu, b.measure(), 1e-12);
    EXPECT_TRUE(rec.lemma_x_ok);
    EXPECT_TRUE(rec.lyapunov_ok) << rec.lyapunov_lhs << " vs " << rec.lyapunov_rhs;
    EXPECT_NEAR(st.hand_mass(), rec.mu - rec.nu, 1e-12);
}

TEST(CookieSmash, CurrentSumDoesNotGrow)
{
    GridSpec const g = lattice_grid(1.0 / 32, 2.5);
    Mask const a = disk(g, {0, 0, 0}, 1);
    Mask const b = disk(g, {0.5, 0, 0}, 0.25);
    GameState st(a, {b}, one(), 0.05);
    Mask const start = st.current_sum();
    st.move1_split(0, 1, 0.4, 1e-6, 2.0 / 32);
    st.cookie_smash(0, 0.4, params_for(100));
    Mask const after = st.current_sum();
    EXPECT_LE(difference_count(after, start), default_essential_tolerance(after, start));
}

TEST(CookieSmash, Preconditions)
{
    GridSpec const g = lattice_grid(1.0 / 32, 1.5);
    Mask const a = disk(g, {0, 0, 0}, 1);
    Mask const b = disk(g, {0, 0, 0}, 0.25);
    GameState st(a, {b}, one(), 0.05);
    // Not a ball yet.
    EXPECT_THROW(st.cookie_smash(0, 0.5, params_for(100)), ConfigError);
    st.move1_split(0, 1, 0.5, 1e-6, 2.0 / 32);
    EXPECT_THROW(st.cookie_smash(0, 0.1, params_for(100)), ConfigError);
    EXPECT_THROW(st.cookie_smash(0, 0.5, params_for(0.8)), ConfigError);
}

TEST(GameState, Outcomes)
{
    GridSpec const g = lattice_grid(1.0 / 32, 1.5);
    Mask const a = disk(g, {0, 0, 0}, 1);
    EXPECT_EQ(GameState(a, {}, one(), 0.05).outcome(), Outcome::won);
    EXPECT_EQ(GameState(a, {disk(g, {0, 0, 0}, 0.5)}, one(), 0.05).outcome(),
              Outcome::playing);
    EXPECT_EQ(GameState(a, {disk(g, {0, 0, 0}, 0.1)}, one(), 0.05).outcome(),
              Outcome::won);
}

TEST(RunStrategy, DistantHandWinsInOneRound)
{
    auto const a = make_ball(2, {-2, 0, 0}, 0.5);
    auto const b = make_ball(2, {2, 0, 0}, 0.5);
    GameOptions o;
    o.delta = 100;
    auto const r = run_strategy(a, b, one(), 1.0 / 32, o);
    EXPECT_EQ(r.outcome, Outcome::won);
    EXPECT_EQ(r.rounds, 1);
    EXPECT_EQ(r.final_hand_mass, 0);
    EXPECT_EQ(r.mass_loss, 0);
    EXPECT_TRUE(r.all_corollary);
    EXPECT_TRUE(r.all_current_sum);
    EXPECT_LE(r.rounds, r.round_bound);
}

TEST(RunStrategy, SmallHandWinsAtOnce)
{
    auto const a = make_ball(2, {0, 0, 0}, 1);
    auto const b = make_ball(2, {0, 0, 0}, 0.1);
    GameOptions o;
    o.eps = 0.05;
    auto const r = run_strategy(a, b, one(), 1.0 / 32, o);
    EXPECT_EQ(r.outcome, Outcome::won);
    EXPECT_EQ(r.rounds, 0);
}

TEST(RunStrategy, BallInsideTableDeposits)
{
    auto const a = make_ball(2, {0, 0, 0}, 1);
    auto const b = make_ball(2, {0, 0, 0}, 0.5);
    auto const s = TestFunction::mollified_newton(2, {500, 0, 0}, 0.25);
    GameOptions o;
    o.delta = 100;
    auto const r = run_strategy(a, b, s, 1.0 / 32, o);
    EXPECT_EQ(r.outcome, Outcome::won) << r.reason;
    EXPECT_EQ(r.rounds, 1);
    EXPECT_LT(r.mass_loss, 0.05);
    EXPECT_LT(r.s_increase, 0.05);
    EXPECT_TRUE(r.all_lyapunov);
    EXPECT_TRUE(r.all_lemma_x);
    EXPECT_TRUE(r.all_corollary);
    EXPECT_LE(r.max_sigma, r.params.sigma_b * 1.05);
}

TEST(RunStrategy, Deterministic)
{
    auto const a = make_ball(2, {0, 0, 0}, 1);
    auto const b = make_ball(2, {0.5, 0, 0}, 0.5);
    GameOptions o;
    o.delta = 100;
    o.max_rounds = 2;
    o.throw_on_grid_floor = false;
    auto const r1 = run_strategy(a, b, one(), 1.0 / 32, o);
    auto const r2 = run_strategy(a, b, one(), 1.0 / 32, o);
    ASSERT_EQ(r1.moves.size(), r2.moves.size());
    for (std::size_t i = 0; i < r1.moves.size(); ++i)
    {
        EXPECT_EQ(r1.moves[i].sigma_change, r2.moves[i].sigma_change);
        EXPECT_EQ(r1.moves[i].center, r2.moves[i].center);
    }
    EXPECT_EQ(r1.final_table, r2.final_table);
}

TEST(RunStrategy, GridFloor)
{
    auto const a = make_ball(2, {0, 0, 0}, 1);
    auto const b = make_ball(2, {0.5, 0, 0}, 1);
    GameOptions o;
    o.delta = 0.5;  // R = delta / 2N is far below 4h
    EXPECT_THROW(run_strategy(a, b, one(), 1.0 / 16, o), GridTooCoarse);
    o.throw_on_grid_floor = false;
    auto const r = run_strategy(a, b, one(), 1.0 / 16, o);
    EXPECT_EQ(r.outcome, Outcome::lost);
    EXPECT_TRUE(r.grid_floor);
    EXPECT_NE(r.reason.find("refine grid"), std::string::npos);
}

TEST(RunStrategy, PoleTooCloseRejected)
{
    auto const a = make_ball(2, {0, 0, 0}, 1);
    auto const b = make_ball(2, {0.5, 0, 0}, 1);
    auto const s = TestFunction::newton(2, {3, 0, 0});
    GameOptions o;
    o.delta = 5;
    EXPECT_THROW(run_strategy(a, b, s, 1.0 / 16, o), ConfigError);
}
