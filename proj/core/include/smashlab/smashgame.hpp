// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The smash game: a table set, hand sets, four moves, and the cookie-cutter
// strategy with its second-moment ledger.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "smashlab/geometry.hpp"
#include "smashlab/grid.hpp"
#include "smashlab/quadrature.hpp"
#include "smashlab/sandpile.hpp"

namespace smashlab {

enum class MoveKind
{
    split,         //!< move 1: hand set -> disjoint balls
    shrink,        //!< move 2: table -> open subset
    smash,         //!< move 3: hand B -> (B ⊕ C) \ C
    deposit,       //!< move 4: B \ A onto the table, A ∩ B stays in hand
    cookie_smash,  //!< cookie cutter + move 3 + move 4 on one ball
};

char const* to_string(MoveKind kind);

enum class Outcome
{
    playing,
    won,
    lost,
};

char const* to_string(Outcome outcome);

struct MoveRecord
{
    MoveKind kind = MoveKind::split;
    int round = 0;
    //! Change in mass in hand.
    double hand_mass_change = 0;
    //! Change in current mass (table plus hands); negative is a loss.
    double mass_change = 0;
    double s_change = 0;
    double sigma_change = 0;
    double radius = 0;  //!< R of a cookie smash, ball cap of a split, t of a shrink
    Point center{0, 0, 0};
    double ball_radius = 0;
    double mu = 0;  //!< ball mass
    double nu = 0;  //!< mass of E outside the table
    std::size_t balls = 0;
    double lemma_x_bound = 0;
    double lyapunov_lhs = 0;
    double lyapunov_rhs = 0;
    bool lemma_x_ok = true;
    bool lyapunov_ok = true;
};

struct RoundRecord
{
    int n = 0;
    double R = 0;
    double eta = 0;
    std::size_t balls = 0;
    double hand_mass = 0;  //!< after the split, before any smash
    double sigma = 0;      //!< total second moment at the start of the round
    double s_integral = 0;
    double split_loss = 0;
    double shrink_loss = 0;
    double rounding = 0;  //!< current-mass change from moves 3 and 4
    double d_sigma = 0;   //!< cookie smashes
    double d_sigma_shrink = 0;
    double d_hand_deposit = 0;  //!< decrease of mass in hand by deposits
    double corollary_lhs = 0;
    double corollary_rhs = 0;
    bool corollary_ok = true;
    std::size_t current_sum_growth = 0;
    std::size_t current_sum_tolerance = 0;
    bool current_sum_ok = true;
};

//! Constants of the strategy for one scene.
struct StrategyParams
{
    int dim = 2;
    double eps = 0;
    double delta = 0;
    double cs = 0;  //!< third-derivative constant of s
    double Cs = 0;  //!< 2 N^3 c_s
    double N = 0;   //!< diameter constant N_d
    double lambda_b = 0;
    double rad_sum = 0;  //!< rad(A ⊕ B)
    double sigma_b = 0;  //!< (λ(A) + λ(B)) rad(A ⊕ B)^2
    //! Relative slack on the per-move and per-round inequalities.
    double slack = 0.1;
    //! Smallest ball radius move 1 may use, in cells.
    double min_ball_cells = 2;

    static StrategyParams make(int dim,
                               double eps,
                               double delta,
                               double cs,
                               double lambda_a,
                               double lambda_b,
                               double rad_sum);

    //! min(delta / 2N, eps / (6 C_s λ(B) sqrt n))
    double R(int n) const;
    //! eps / 2^{n+1}
    double eta(int n) const;
    //! (1/2^{k+1}) min{eps, R^2 m / ((d+2) rad^2)} for the k-th shrink.
    double shrink_budget(long k, double R, double m) const;
    //! Round bound M = (d+2)(σ_b + |H| δ λ(B)) / eps, rounded up.
    long round_bound() const;
};

//! A hand set; balls keep their center and radius.
struct Hand
{
    Mask set;
    std::optional<Point> center;
    double radius = 0;
};

/*!
 * Table, hands and running totals. Every mask lives on one lattice; the
 * table keeps the base grid and hands use tight windows.
 */
class GameState
{
  public:
    GameState(Mask table, std::vector<Mask> hands, TestFunction s, double eps);

    Mask const& table() const { return table_; }
    std::vector<Hand> const& hands() const { return hands_; }
    TestFunction const& s() const { return s_; }
    double eps() const { return eps_; }
    GridSpec const& grid() const { return table_.grid(); }

    double hand_mass() const;
    double current_mass() const;
    double s_integral() const;
    double second_moment() const;
    MomentLedger ledger() const;
    MomentLedger const& start() const { return start_; }

    //! WON once the mass in hand is below eps; LOST if the current mass
    //! or the s integral leave their budgets.
    Outcome outcome() const;

    //! table ⊕ all hands on the base grid.
    Mask current_sum(StabilizeParams const& params = {}) const;

    /*!
     * Move 1: replace hands [first, last) by disjoint rasterized balls of
     * radius below R, largest inscribed ball first, until the uncovered
     * mass is below eta; the rest is dropped. Throws GridTooCoarse if the
     * balls would have to be smaller than min_radius.
     */
    MoveRecord move1_split(std::size_t first,
                           std::size_t last,
                           double R,
                           double eta,
                           double min_radius);

    //! Move 2: deflate the table by the largest t in {h, h/2, ...} whose
    //! loss is below budget (t < h leaves a mask unchanged).
    MoveRecord move2_shrink(double budget);

    /*!
     * Move 3: hand j becomes (B ⊕ C) \ C. The new set takes the cells of
     * largest final density outside C, as many as B had; with a center the
     * choice is made by whole H-orbits, so the set is symmetric except for
     * fewer than |H| cells of the last orbit.
     */
    MoveRecord move3_smash(std::size_t j,
                           Mask const& c,
                           std::optional<Point> center = std::nullopt);

    //! Move 4: put B \ A on the table and keep A ∩ B; drops empty hands.
    MoveRecord move4_deposit(std::size_t j);

    //! Cookie cutter on ball j, then moves 3 and 4. Checks the second
    //! moment and s-integral bounds of a single smash.
    MoveRecord cookie_smash(std::size_t j, double R, StrategyParams const& params);

    StabilizeParams solver;
    std::vector<MoveRecord> history;
    int round = 0;

  private:
    Mask table_;
    std::vector<Hand> hands_;
    TestFunction s_;
    double eps_;
    MomentLedger start_;
    MomentLedger table_moments_;
    std::vector<MomentLedger> hand_moments_;
    double start_hand_ = 0;
};

struct GameOptions
{
    double eps = 0.05;
    //! Margin of s's domain; 0 picks half of rad(A ∪ B).
    double delta = 0;
    //! Relative slack on the Lyapunov and Corollary inequalities.
    double slack = 0.1;
    double min_ball_cells = 2;
    //! Stop after this many rounds even without a result (0: the bound M).
    long max_rounds = 0;
    //! Recompute the current sum after every round.
    bool check_current_sum = true;
    //! Keep the table mask of every round.
    bool snapshots = false;
    //! With false, hitting the grid floor ends the run as LOST with the
    //! ledgers so far instead of throwing GridTooCoarse.
    bool throw_on_grid_floor = true;
    StabilizeParams solver;
};

struct GameResult
{
    Outcome outcome = Outcome::playing;
    std::string reason;
    StrategyParams params;
    TestFunction s = TestFunction::constant(2, 1);  //!< shifted test function
    long round_bound = 0;
    int rounds = 0;
    double initial_hand_mass = 0;
    double final_hand_mass = 0;
    double mass_loss = 0;
    double s_increase = 0;
    double max_sigma = 0;
    std::size_t cookie_smashes = 0;
    bool all_lyapunov = true;
    bool all_lemma_x = true;
    bool all_corollary = true;
    bool all_current_sum = true;
    bool grid_floor = false;
    double seconds = 0;
    std::vector<RoundRecord> rounds_log;
    std::vector<MoveRecord> moves;
    std::vector<Mask> snapshots;
    Mask final_table;
};

/*!
 * Play the cookie-cutter strategy on table A and hand B.
 *
 * s is shifted to be nonnegative on (A ⊕ B)^delta. Throws GridTooCoarse
 * when R_n drops below 4h or a split would need balls under the minimum.
 */
GameResult run_strategy(ShapeExpr const& a,
                        ShapeExpr const& b,
                        TestFunction const& s,
                        double h,
                        GameOptions const& options = {});

}  // namespace smashlab
