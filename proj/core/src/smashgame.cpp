// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smashlab/smashgame.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace smashlab {

namespace {

double length(Point const& p, int dim)
{
    double s = 0;
    for (int a = 0; a < dim; ++a)
        s += p[a] * p[a];
    return std::sqrt(s);
}

//! Largest |center| over the true cells.
double mask_radius(Mask const& m)
{
    GridSpec const& g = m.grid();
    double best = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        if (m[i])
            best = std::max(best, length(g.center(i), g.dim()));
    }
    return best;
}

//! Smallest and largest distance from p to a true cell center.
std::pair<double, double> distance_range(Mask const& m, Point const& p)
{
    GridSpec const& g = m.grid();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        if (!m[i])
            continue;
        Point c = g.center(i);
        for (int a = 0; a < g.dim(); ++a)
            c[a] -= p[a];
        double const r = length(c, g.dim());
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {lo, hi};
}

//! Largest index distance (Chebyshev) from k to any corner of a box.
long box_reach(IndexBox const& b, Index const& k, int dim)
{
    long reach = 0;
    for (int a = 0; a < dim; ++a)
        reach = std::max({reach, k[a] - b.lo[a], b.hi[a] - 1 - k[a]});
    return reach;
}

void add_into(DensityField& w, Mask const& m)
{
    GridSpec const& g = m.grid();
    GridSpec const& target = w.grid();
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        if (!m[i])
            continue;
        Index const k = g.index(i);
        if (!target.contains(k))
            throw OutOfBounds("current sum: a hand set leaves the base grid");
        w[target.linear(k)] += 1.0;
    }
}

double boundary_measure(Mask const& m)
{
    return static_cast<double>(boundary_cell_count(m)) * m.grid().cell_volume();
}

double sup_abs(TestFunction const& s, Mask const& m)
{
    double best = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        if (m[i])
            best = std::max(best, std::abs(s(m.grid().center(i))));
    }
    return best;
}

struct Orbit
{
    double value;
    std::size_t rep;
    std::vector<std::size_t> cells;
};

/*!
 * Cells of f outside c, chosen by decreasing density until target cells
 * are taken. With a center, cells move in whole H-orbits about it except
 * for the last orbit, which is filled in index order.
 */
Mask pick_cells(DensityField const& f,
                Mask const& c,
                std::size_t target,
                std::optional<Index> const& center)
{
    GridSpec const& g = f.grid();
    int const d = g.dim();
    std::vector<Orbit> orbits;
    std::vector<std::uint8_t> seen(f.size(), 0);
    auto const group = center ? cubic_isometries(d) : std::vector<IsometryElem>{};
    for (std::size_t i = 0; i < f.size(); ++i)
    {
        if (seen[i] || c[i] || !(f[i] > 0))
            continue;
        Orbit o{0, i, {}};
        if (center)
        {
            Index const k = g.index(i);
            Index rel{0, 0, 0};
            for (int a = 0; a < d; ++a)
                rel[a] = k[a] - (*center)[a];
            for (auto const& u : group)
            {
                Index img = u.apply(rel);
                for (int a = 0; a < d; ++a)
                    img[a] += (*center)[a];
                if (!g.contains(img))
                    throw OutOfBounds("smash: window is not symmetric about the center");
                std::size_t const li = g.linear(img);
                if (!seen[li])
                {
                    seen[li] = 1;
                    o.cells.push_back(li);
                }
            }
        }
        else
        {
            seen[i] = 1;
            o.cells.push_back(i);
        }
        std::vector<double> v;
        for (auto li : o.cells)
            v.push_back(f[li]);
        o.value = pairwise_sum(v) / static_cast<double>(v.size());
        orbits.push_back(std::move(o));
    }
    std::sort(orbits.begin(), orbits.end(), [](Orbit const& a, Orbit const& b) {
        return a.value != b.value ? a.value > b.value : a.rep < b.rep;
    });
    Mask out(g);
    std::size_t count = 0;
    for (auto const& o : orbits)
    {
        if (count == target)
            break;
        // The last orbit may be split, keeping the count exact.
        for (auto li : o.cells)
        {
            if (count == target)
                break;
            out.set(li, true);
            ++count;
        }
    }
    return out;
}

}  // namespace

char const* to_string(MoveKind kind)
{
    switch (kind)
    {
        case MoveKind::split:
            return "split";
        case MoveKind::shrink:
            return "shrink";
        case MoveKind::smash:
            return "smash";
        case MoveKind::deposit:
            return "deposit";
        case MoveKind::cookie_smash:
            return "cookie_smash";
    }
    return "?";
}

char const* to_string(Outcome outcome)
{
    switch (outcome)
    {
        case Outcome::playing:
            return "PLAYING";
        case Outcome::won:
            return "WON";
        case Outcome::lost:
            return "LOST";
    }
    return "?";
}

//---------------------------------------------------------------------------//
// StrategyParams
//---------------------------------------------------------------------------//

StrategyParams StrategyParams::make(int dim,
                                    double eps,
                                    double delta,
                                    double cs,
                                    double lambda_a,
                                    double lambda_b,
                                    double rad_sum)
{
    if (!(eps > 0) || !(delta > 0))
        throw ConfigError("strategy: eps and delta must be positive");
    StrategyParams p;
    p.dim = dim;
    p.eps = eps;
    p.delta = delta;
    p.cs = cs;
    p.N = diameter_constant(dim);
    p.Cs = 2 * p.N * p.N * p.N * cs;
    p.lambda_b = lambda_b;
    p.rad_sum = rad_sum;
    p.sigma_b = (lambda_a + lambda_b) * rad_sum * rad_sum;
    return p;
}

double StrategyParams::R(int n) const
{
    double const a = delta / (2 * N);
    if (!(Cs > 0) || !(lambda_b > 0))
        return a;
    return std::min(a, eps / (6 * Cs * lambda_b * std::sqrt(static_cast<double>(n))));
}

double StrategyParams::eta(int n) const
{
    return eps / std::ldexp(1.0, n + 1);
}

double StrategyParams::shrink_budget(long k, double R, double m) const
{
    double const inner = rad_sum > 0
                             ? R * R * m / ((dim + 2) * rad_sum * rad_sum)
                             : eps;
    return std::min(eps, inner) / std::ldexp(1.0, static_cast<int>(std::min(k + 1, 1000L)));
}

long StrategyParams::round_bound() const
{
    double const m
        = (dim + 2) * (sigma_b + cubic_group_order(dim) * delta * lambda_b) / eps;
    if (!(m < 9e18))
        return std::numeric_limits<long>::max();
    return static_cast<long>(std::ceil(m));
}

//---------------------------------------------------------------------------//
// GameState
//---------------------------------------------------------------------------//

GameState::GameState(Mask table, std::vector<Mask> hands, TestFunction s, double eps)
    : table_(std::move(table)), s_(std::move(s)), eps_(eps)
{
    if (!(eps > 0))
        throw ConfigError("game: eps must be positive");
    table_moments_ = moments_of(table_, s_);
    for (auto& m : hands)
    {
        if (!m.grid().same_lattice(table_.grid()))
            throw ConfigError("game: hand and table live on different lattices");
        if (m.empty())
            continue;
        Mask t = m.tight();
        hand_moments_.push_back(moments_of(t, s_));
        hands_.push_back(Hand{std::move(t), std::nullopt, 0});
    }
    start_ = ledger();
    start_hand_ = hand_mass();
}

double GameState::hand_mass() const
{
    double m = 0;
    for (auto const& h : hand_moments_)
        m += h.mass;
    return m;
}

double GameState::current_mass() const
{
    return table_moments_.mass + hand_mass();
}

double GameState::s_integral() const
{
    return ledger().s_integral;
}

double GameState::second_moment() const
{
    return ledger().second_moment;
}

MomentLedger GameState::ledger() const
{
    MomentLedger total = table_moments_;
    for (auto const& h : hand_moments_)
        total += h;
    return total;
}

Outcome GameState::outcome() const
{
    MomentLedger const now = ledger();
    if (now.mass < start_.mass - eps_ || now.s_integral > start_.s_integral + eps_)
        return Outcome::lost;
    if (hand_mass() < eps_)
        return Outcome::won;
    return Outcome::playing;
}

Mask GameState::current_sum(StabilizeParams const& params) const
{
    DensityField w(table_.grid());
    w.add(table_);
    for (auto const& h : hands_)
        add_into(w, h.set);
    return smash_sum(w, params).domain;
}

MoveRecord GameState::move1_split(std::size_t first,
                                  std::size_t last,
                                  double R,
                                  double eta,
                                  double min_radius)
{
    if (first > last || last > hands_.size())
        throw ConfigError("split: hand range out of bounds");
    if (!(R > 0) || !(eta > 0))
        throw ConfigError("split: R and eta must be positive");
    GridSpec const& lattice = table_.grid();
    double const h = lattice.h();
    double const vol = lattice.cell_volume();
    int const d = lattice.dim();
    MomentLedger const before = ledger();

    struct Entry
    {
        double dist;  // in cells
        std::size_t hand;
        std::size_t cell;
        bool operator<(Entry const& o) const
        {
            if (dist != o.dist)
                return dist < o.dist;
            if (hand != o.hand)
                return hand > o.hand;
            return cell > o.cell;
        }
    };

    std::vector<Mask> rem;
    std::priority_queue<Entry> heap;
    std::size_t residual = 0;
    for (std::size_t j = first; j < last; ++j)
    {
        Mask r = hands_[j].set.tight(1);
        Mask comp(r.grid(), true);
        comp -= r;
        auto const d2 = squared_distance_to(comp, true);
        for (std::size_t i = 0; i < r.size(); ++i)
        {
            if (r[i])
                heap.push({std::sqrt(d2[i]), j - first, i});
        }
        residual += r.count();
        rem.push_back(std::move(r));
    }

    double const cap = R * (1 - 1e-9);
    std::vector<Hand> balls;
    while (static_cast<double>(residual) * vol >= eta)
    {
        if (heap.empty())
            throw GridTooCoarse("grid too coarse for eta: no admissible ball left");
        Entry top = heap.top();
        heap.pop();
        Mask& r = rem[top.hand];
        if (!r[top.cell])
            continue;
        // Earlier balls may have come closer than the stored distance.
        GridSpec const& g = r.grid();
        Index const k = g.index(top.cell);
        auto const reach = static_cast<long>(std::ceil(top.dist));
        double best = top.dist;
        Index o{0, 0, 0};
        for (o[2] = d > 2 ? -reach : 0; o[2] <= (d > 2 ? reach : 0); ++o[2])
        {
            for (o[1] = d > 1 ? -reach : 0; o[1] <= (d > 1 ? reach : 0); ++o[1])
            {
                for (o[0] = -reach; o[0] <= reach; ++o[0])
                {
                    double const q = std::sqrt(static_cast<double>(
                        o[0] * o[0] + o[1] * o[1] + o[2] * o[2]));
                    if (q >= best)
                        continue;
                    if (!r.at(Index{k[0] + o[0], k[1] + o[1], k[2] + o[2]}))
                        best = q;
                }
            }
        }
        if (best < top.dist)
        {
            heap.push({best, top.hand, top.cell});
            continue;
        }
        // Just inside the nearest uncovered-by-rem center, so rounding in
        // ball_mask cannot reach it.
        double const radius = std::min(best * h * (1 - 1e-9), cap);
        if (best * h < min_radius)
        {
            std::ostringstream os;
            os << "grid too coarse for eta = " << eta << ": uncovered mass "
               << static_cast<double>(residual) * vol
               << " but the largest admissible ball has radius " << best * h
               << " < " << min_radius;
            throw GridTooCoarse(os.str());
        }
        Point const x = g.center(k);
        Mask ball = ball_mask(centered_window(lattice, k, radius), x, radius);
        r -= ball.cropped(g);
        residual -= ball.count();
        balls.push_back(Hand{std::move(ball), x, radius});
    }

    std::vector<MomentLedger> ball_moments;
    for (auto const& ball : balls)
        ball_moments.push_back(moments_of(ball.set, s_));
    hands_.erase(hands_.begin() + static_cast<long>(first),
                 hands_.begin() + static_cast<long>(last));
    hand_moments_.erase(hand_moments_.begin() + static_cast<long>(first),
                        hand_moments_.begin() + static_cast<long>(last));
    hands_.insert(hands_.begin() + static_cast<long>(first), balls.begin(), balls.end());
    hand_moments_.insert(hand_moments_.begin() + static_cast<long>(first),
                         ball_moments.begin(),
                         ball_moments.end());

    MomentLedger const delta = ledger() - before;
    MoveRecord rec;
    rec.kind = MoveKind::split;
    rec.round = round;
    rec.hand_mass_change = delta.mass;
    rec.mass_change = delta.mass;
    rec.s_change = delta.s_integral;
    rec.sigma_change = delta.second_moment;
    rec.radius = R;
    rec.balls = balls.size();
    history.push_back(rec);
    return rec;
}

MoveRecord GameState::move2_shrink(double budget)
{
    MoveRecord rec;
    rec.kind = MoveKind::shrink;
    rec.round = round;
    if (!table_.empty() && budget > 0)
    {
        // Sub-cell deflations leave a mask unchanged, so only t = h can
        // remove anything.
        Mask const inner = deflate(table_, table_.grid().h());
        double const loss
            = static_cast<double>(table_.count() - inner.count()) * table_.grid().cell_volume();
        if (loss < budget)
        {
            MomentLedger const removed = moments_of(table_ - inner, s_);
            table_ = inner;
            table_moments_ = table_moments_ - removed;
            rec.mass_change = -removed.mass;
            rec.s_change = -removed.s_integral;
            rec.sigma_change = -removed.second_moment;
            rec.radius = table_.grid().h();
        }
    }
    history.push_back(rec);
    return rec;
}

MoveRecord GameState::move3_smash(std::size_t j, Mask const& c, std::optional<Point> center)
{
    if (j >= hands_.size())
        throw ConfigError("smash: hand index out of range");
    GridSpec const& lattice = table_.grid();
    if (!c.grid().same_lattice(lattice))
        throw ConfigError("smash: C lives on a different lattice");
    if (difference_count(c.cropped(lattice), table_) != 0
        || c.cropped(lattice).count() != c.count())
    {
        throw ConfigError("smash: C is not contained in the table");
    }
    int const d = lattice.dim();
    Mask const& b = hands_[j].set;
    MomentLedger const before = hand_moments_[j];

    std::optional<Index> kx;
    if (center)
        kx = lattice.cell_at_center(*center);
    double const thick = std::pow(b.measure() / unit_ball_volume(d), 1.0 / d);
    long pad = static_cast<long>(std::ceil(thick / lattice.h())) + 4;
    SumResult res;
    for (int attempt = 0;; ++attempt)
    {
        GridSpec win;
        if (kx)
        {
            long reach = box_reach(b.bounds(), *kx, d);
            if (!c.empty())
                reach = std::max(reach, box_reach(c.bounds(), *kx, d));
            win = centered_window(lattice, *kx, static_cast<double>(reach + pad) * lattice.h());
        }
        else
        {
            IndexBox hull = b.bounds();
            if (!c.empty())
                hull = hull.hull(c.bounds(), d);
            win = lattice.window(hull.expanded(pad, d));
        }
        std::vector<Mask> parts{b.regrid(win), c.regrid(win)};
        try
        {
            res = smash_sum_on(parts, win, solver);
            break;
        }
        catch (BoundaryContact const&)
        {
            if (attempt >= 4)
                throw;
            pad *= 2;
        }
    }
    Mask const cw = c.regrid(res.final_field.grid());
    Mask e = pick_cells(res.final_field, cw, b.count(), kx).tight();

    hands_[j] = Hand{std::move(e), std::nullopt, 0};
    hand_moments_[j] = moments_of(hands_[j].set, s_);
    MomentLedger const delta = hand_moments_[j] - before;

    MoveRecord rec;
    rec.kind = MoveKind::smash;
    rec.round = round;
    rec.hand_mass_change = delta.mass;
    rec.mass_change = delta.mass;
    rec.s_change = delta.s_integral;
    rec.sigma_change = delta.second_moment;
    if (center)
        rec.center = *center;
    return rec;
}

MoveRecord GameState::move4_deposit(std::size_t j)
{
    if (j >= hands_.size())
        throw ConfigError("deposit: hand index out of range");
    Mask const& b = hands_[j].set;
    Mask const a_local = table_.cropped(b.grid());
    Mask out = b - a_local;
    Mask keep = b & a_local;

    // The two weights are disjoint, so the sum is their union.
    MomentLedger const moved = moments_of(out, s_);
    table_ |= out.regrid(table_.grid());
    table_moments_ += moved;

    MoveRecord rec;
    rec.kind = MoveKind::deposit;
    rec.round = round;
    rec.hand_mass_change = -moved.mass;
    rec.nu = moved.mass;
    if (keep.empty())
    {
        hands_.erase(hands_.begin() + static_cast<long>(j));
        hand_moments_.erase(hand_moments_.begin() + static_cast<long>(j));
    }
    else
    {
        hand_moments_[j] = hand_moments_[j] - moved;
        hands_[j] = Hand{keep.tight(), std::nullopt, 0};
    }
    return rec;
}

MoveRecord GameState::cookie_smash(std::size_t j, double R, StrategyParams const& params)
{
    if (j >= hands_.size())
        throw ConfigError("cookie smash: hand index out of range");
    Hand const ball = hands_[j];
    if (!ball.center)
        throw ConfigError("cookie smash: hand set is not a ball");
    if (!(ball.radius < R))
        throw ConfigError("cookie smash: ball radius must be below R");
    if (!(R < params.delta / 2))
        throw ConfigError("cookie smash: R must be below delta / 2");
    Point const x = *ball.center;
    int const d = table_.grid().dim();

    Index const kx = table_.grid().cell_at_center(x);
    Mask const c = table_.at(kx) ? cookie_cutter(x, R, table_) : symmetric_core(x, R, table_);

    MomentLedger const b_moments = hand_moments_[j];
    MoveRecord const smash = move3_smash(j, c, x);
    Mask const e = hands_[j].set;
    MoveRecord const dep = move4_deposit(j);

    MoveRecord rec;
    rec.kind = MoveKind::cookie_smash;
    rec.round = round;
    rec.hand_mass_change = smash.hand_mass_change + dep.hand_mass_change;
    rec.mass_change = smash.mass_change;
    rec.s_change = smash.s_change;
    rec.sigma_change = smash.sigma_change;
    rec.radius = R;
    rec.center = x;
    rec.ball_radius = ball.radius;
    rec.mu = b_moments.mass;
    rec.nu = dep.nu;

    double const tol = std::max(sup_abs(s_, ball.set), sup_abs(s_, e))
                       * (boundary_measure(ball.set) + boundary_measure(e));
    rec.lemma_x_bound = params.Cs * R * R * R * rec.mu + tol;
    rec.lemma_x_ok = rec.s_change <= rec.lemma_x_bound;
    rec.lyapunov_lhs = rec.sigma_change + cubic_group_order(d) * R * R * rec.nu;
    rec.lyapunov_rhs = 2.0 / (d + 2) * R * R * rec.mu;
    rec.lyapunov_ok = rec.lyapunov_lhs >= (1 - params.slack) * rec.lyapunov_rhs;
    history.push_back(rec);
    return rec;
}

//---------------------------------------------------------------------------//
// Strategy
//---------------------------------------------------------------------------//

namespace {

//! Constant making s nonnegative on the delta-neighbourhood of a region.
double shift_for(TestFunction const& s, Mask const& region, double delta)
{
    if (s.pole() && (s.family() == TestFamily::newton
                     || s.family() == TestFamily::mollified_newton))
    {
        auto const [lo, hi] = distance_range(region, *s.pole());
        // Positive kernels decrease with distance, negated ones increase.
        double const r = s.sign() > 0 ? hi + delta : std::max(lo - delta, 1e-300);
        return s.sign() * s.radial(r).f - s.offset();
    }
    // Sample the delta-padded bounding box.
    GridSpec const& g = region.grid();
    int const dim = g.dim();
    IndexBox const b = region.bounds();
    Point lo = g.center(b.lo);
    Point hi = g.center(Index{b.hi[0] - 1, b.hi[1] - 1, b.hi[2] - 1});
    int const n = 64;
    double best = std::numeric_limits<double>::infinity();
    Index k{0, 0, 0};
    for (k[2] = 0; k[2] <= (dim > 2 ? n : 0); ++k[2])
    {
        for (k[1] = 0; k[1] <= (dim > 1 ? n : 0); ++k[1])
        {
            for (k[0] = 0; k[0] <= n; ++k[0])
            {
                Point p{0, 0, 0};
                for (int a = 0; a < dim; ++a)
                    p[a] = lo[a] - delta + (hi[a] - lo[a] + 2 * delta) * k[a] / n;
                best = std::min(best, s(p));
            }
        }
    }
    return best;
}

}  // namespace

GameResult run_strategy(ShapeExpr const& a,
                        ShapeExpr const& b,
                        TestFunction const& s_in,
                        double h,
                        GameOptions const& options)
{
    auto const t0 = std::chrono::steady_clock::now();
    int const d = a->dim;
    if (b->dim != d || s_in.dim() != d)
        throw ConfigError("game: dimensions of A, B and s differ");

    std::vector<ShapeExpr> shapes{a, b};
    GridSpec const compact = working_grid(shapes, h, SizingPolicy::compact);
    // Cell centers on hZ^d, so a ball centered at a lattice point is
    // rasterized symmetrically. Extra layers hold smash outputs that poke
    // past the rasterized sum.
    Point origin{0, 0, 0};
    for (int k = 0; k < d; ++k)
        origin[k] = -h / 2;
    GridSpec const base(d, h, origin, compact.box().expanded(8, d));
    Mask const ma = rasterize(a, base);
    Mask const mb = rasterize(b, base);
    if (mb.empty())
        throw ConfigError("game: the hand set B is empty");

    SumResult const sum = smash_pair(ma, mb, options.solver);
    double const rad_sum = mask_radius(sum.domain);
    double const delta = options.delta > 0 ? options.delta : 0.5 * mask_radius(ma | mb);

    if (s_in.pole())
    {
        auto const [lo, hi] = distance_range(sum.domain, *s_in.pole());
        bool const global = s_in.family() == TestFamily::mollified_newton && s_in.sign() > 0;
        double const need = delta + 4 * h
                            + (s_in.family() == TestFamily::mollified_newton ? s_in.rho() : 0);
        if (!global && lo < need)
        {
            std::ostringstream os;
            os << "game: " << s_in.id() << " is not superharmonic on the delta = "
               << delta << " neighbourhood of A ⊕ B (pole distance " << lo << ")";
            throw ConfigError(os.str());
        }
        (void)hi;
    }
    else if (s_in.family() == TestFamily::custom)
    {
        throw ConfigError("game: custom test functions are not supported");
    }

    TestFunction const s = s_in.shifted(shift_for(s_in, sum.domain, delta));
    double cs = 0;
    if (s.pole())
        cs = analytic_cs_beyond(s, distance_range(sum.domain, *s.pole()).first - delta);
    else
        cs = estimate_cs(s, sum.domain);

    GameResult result;
    result.params = StrategyParams::make(d, options.eps, delta, cs, ma.measure(), mb.measure(), rad_sum);
    result.params.slack = options.slack;
    result.params.min_ball_cells = options.min_ball_cells;
    result.s = s;
    StrategyParams const& params = result.params;
    result.round_bound = params.round_bound();
    long const limit = options.max_rounds > 0 ? options.max_rounds : result.round_bound;

    GameState state(ma, {mb}, s, options.eps);
    state.solver = options.solver;
    result.initial_hand_mass = state.hand_mass();
    Mask previous_sum = options.check_current_sum ? state.current_sum(options.solver) : Mask();

    long shrinks = 0;
    int const group = cubic_group_order(d);
    try
    {
        for (int n = 1; state.outcome() == Outcome::playing; ++n)
        {
            if (n > limit)
            {
                result.reason = "no win within " + std::to_string(limit) + " rounds";
                break;
            }
            state.round = n;
            RoundRecord rr;
            rr.n = n;
            rr.R = params.R(n);
            rr.eta = params.eta(n);
            if (rr.R < 4 * h)
            {
                std::ostringstream os;
                os << "refine grid or raise eps: R_" << n << " = " << rr.R << " < 4h = " << 4 * h;
                throw GridTooCoarse(os.str());
            }
            MomentLedger const start = state.ledger();
            rr.sigma = start.second_moment;
            rr.s_integral = start.s_integral;

            MoveRecord const split = state.move1_split(
                0, state.hands().size(), rr.R, rr.eta, options.min_ball_cells * h);
            rr.split_loss = -split.mass_change;
            rr.balls = split.balls;
            rr.hand_mass = state.hand_mass();

            std::size_t j = 0;
            for (std::size_t done = 0; done < rr.balls; ++done)
            {
                double const budget = params.shrink_budget(++shrinks, rr.R, rr.hand_mass);
                MoveRecord const shrink = state.move2_shrink(budget);
                rr.shrink_loss -= shrink.mass_change;
                rr.d_sigma_shrink += shrink.sigma_change;

                std::size_t const before = state.hands().size();
                MoveRecord const cs_rec = state.cookie_smash(j, rr.R, params);
                rr.d_sigma += cs_rec.sigma_change;
                rr.d_hand_deposit += cs_rec.nu;
                rr.rounding += cs_rec.mass_change;
                ++result.cookie_smashes;
                result.all_lyapunov = result.all_lyapunov && cs_rec.lyapunov_ok;
                result.all_lemma_x = result.all_lemma_x && cs_rec.lemma_x_ok;
                if (state.hands().size() == before)
                    ++j;
                if (state.outcome() == Outcome::lost)
                    break;
            }
            rr.corollary_lhs = rr.d_sigma + rr.d_sigma_shrink + group * rr.R * rr.R * rr.d_hand_deposit;
            rr.corollary_rhs = rr.R * rr.R * rr.hand_mass / (d + 2);
            rr.corollary_ok = rr.corollary_lhs >= (1 - params.slack) * rr.corollary_rhs;
            result.all_corollary = result.all_corollary && rr.corollary_ok;

            if (options.check_current_sum)
            {
                Mask const now = state.current_sum(options.solver);
                rr.current_sum_growth = difference_count(now, previous_sum);
                rr.current_sum_tolerance = default_essential_tolerance(now, previous_sum);
                rr.current_sum_ok = rr.current_sum_growth <= rr.current_sum_tolerance;
                result.all_current_sum = result.all_current_sum && rr.current_sum_ok;
                previous_sum = now;
            }
            if (options.snapshots)
                result.snapshots.push_back(state.table());
            result.max_sigma = std::max(result.max_sigma, state.second_moment());
            result.rounds_log.push_back(rr);
            result.rounds = n;
        }
    }
    catch (GridTooCoarse const& e)
    {
        if (options.throw_on_grid_floor)
            throw;
        result.grid_floor = true;
        result.reason = e.what();
    }

    result.outcome = result.grid_floor ? Outcome::lost : state.outcome();
    if (result.outcome == Outcome::playing)
        result.outcome = Outcome::lost;
    else if (result.outcome == Outcome::lost && result.reason.empty())
        result.reason = "current mass or s integral left its budget";
    result.final_hand_mass = state.hand_mass();
    result.mass_loss = state.start().mass - state.current_mass();
    result.s_increase = state.s_integral() - state.start().s_integral;
    result.max_sigma = std::max(result.max_sigma, state.start().second_moment);
    result.moves = state.history;
    result.final_table = state.table();
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace smashlab
