// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smashlab/sandpile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "worker_pool.hpp"

namespace smashlab {

namespace {

//! Stencil state for one stabilization: mass m and odometer u, both in
//! density units, on the dense local box [0, n) of the grid.
class Engine
{
  public:
    Engine(DensityField const& w, StabilizeParams const& params);

    //! One sweep; returns the largest projected step seen.
    double sweep();
    //! Largest projected step over the toppling cells of the current state.
    double residual() const;
    //! Largest excess held by the fixed outer layer.
    double edge_excess() const;

    void set_kappa(double k) { kappa_ = k; }
    //! Sweep every toppling cell, not only the neighbourhood of activity.
    void activate_all()
    {
        any_active_ = true;
        active_ = interior_;
    }
    double kappa() const { return kappa_; }

    std::vector<double> const& mass() const { return m_; }
    std::vector<double> const& odometer() const { return u_; }

  private:
    using Local = std::array<long, 3>;

    struct LocalBox
    {
        Local lo{0, 0, 0};
        Local hi{1, 1, 1};
        bool empty(int d) const
        {
            for (int a = 0; a < d; ++a)
            {
                if (hi[a] <= lo[a])
                    return true;
            }
            return false;
        }
    };

    double sweep_sequential(bool forward);
    double sweep_jacobi();
    LocalBox sweep_box() const;
    void note_active(Local const& k);

    std::size_t at(long i0, long i1, long i2) const
    {
        return static_cast<std::size_t>(i0 + n_[0] * (i1 + n_[1] * i2));
    }

    GridSpec grid_;
    int d_;
    Local n_{1, 1, 1};
    std::array<long, 3> stride_{0, 0, 0};
    LocalBox interior_;
    LocalBox active_;
    bool any_active_ = false;
    std::vector<double> m_;
    std::vector<double> u_;
    std::vector<double> t_;
    SweepOrder order_;
    double kappa_ = 1;
    WorkerPool pool_;
};

Engine::Engine(DensityField const& w, StabilizeParams const& params)
    : grid_(w.grid())
    , d_(w.grid().dim())
    , m_(w.values().begin(), w.values().end())
    , u_(w.size(), 0.0)
    , order_(params.order)
    , pool_(params.order == SweepOrder::jacobi
                ? (params.threads ? params.threads : default_thread_count())
                : 1)
{
    for (int a = 0; a < d_; ++a)
        n_[a] = grid_.extent(a);
    stride_ = {1, n_[0], n_[0] * n_[1]};
    for (int a = 0; a < d_; ++a)
    {
        interior_.lo[a] = 1;
        interior_.hi[a] = n_[a] - 1;
    }
    if (order_ == SweepOrder::jacobi)
        t_.assign(w.size(), 0.0);
    // cells above 1 are the seeds of all later toppling
    for (std::size_t i = 0; i < m_.size(); ++i)
    {
        if (m_[i] < 0)
            throw ConfigError("smash_sum: negative density in weight");
        if (m_[i] > 1)
        {
            Index const k = grid_.index(i);
            Local loc{0, 0, 0};
            for (int a = 0; a < d_; ++a)
                loc[a] = k[a] - grid_.box().lo[a];
            note_active(loc);
        }
    }
}

void Engine::note_active(Local const& k)
{
    if (!any_active_)
    {
        any_active_ = true;
        for (int a = 0; a < d_; ++a)
        {
            active_.lo[a] = k[a];
            active_.hi[a] = k[a] + 1;
        }
        return;
    }
    for (int a = 0; a < d_; ++a)
    {
        active_.lo[a] = std::min(active_.lo[a], k[a]);
        active_.hi[a] = std::max(active_.hi[a], k[a] + 1);
    }
}

Engine::LocalBox Engine::sweep_box() const
{
    LocalBox b;
    if (!any_active_)
    {
        for (int a = 0; a < d_; ++a)
            b.hi[a] = 0;
        return b;
    }
    for (int a = 0; a < d_; ++a)
    {
        b.lo[a] = std::max(active_.lo[a] - 1, interior_.lo[a]);
        b.hi[a] = std::min(active_.hi[a] + 1, interior_.hi[a]);
    }
    return b;
}

double Engine::sweep()
{
    return order_ == SweepOrder::jacobi
               ? sweep_jacobi()
               : sweep_sequential(order_ == SweepOrder::forward_lex);
}

double Engine::sweep_sequential(bool forward)
{
    LocalBox const b = sweep_box();
    if (b.empty(d_))
        return 0;
    double const share_factor = 1.0 / (2 * d_);
    double const kappa = kappa_;
    double res = 0;
    long const s1 = stride_[1], s2 = stride_[2];
    LocalBox grown = active_;
    bool grew = false;

    auto visit = [&](long i0, long i1, long i2) {
        std::size_t const idx = at(i0, i1, i2);
        double const excess = m_[idx] - 1;
        double const u = u_[idx];
        if (!(excess > 0) && !(u > 0))
            return;
        double const step = std::max(excess, -u);
        if (step == 0)
            return;
        res = std::max(res, std::abs(step));
        double const t = std::max(kappa * step, -u);
        u_[idx] = u + t;
        m_[idx] -= t;
        double const share = t * share_factor;
        m_[idx - 1] += share;
        m_[idx + 1] += share;
        if (d_ > 1)
        {
            m_[idx - s1] += share;
            m_[idx + s1] += share;
        }
        if (d_ > 2)
        {
            m_[idx - s2] += share;
            m_[idx + s2] += share;
        }
        if (u_[idx] > 0)
        {
            Local const k{i0, i1, i2};
            for (int a = 0; a < d_; ++a)
            {
                if (k[a] < grown.lo[a])
                {
                    grown.lo[a] = k[a];
                    grew = true;
                }
                if (k[a] >= grown.hi[a])
                {
                    grown.hi[a] = k[a] + 1;
                    grew = true;
                }
            }
        }
    };

    if (forward)
    {
        for (long i2 = b.lo[2]; i2 < b.hi[2]; ++i2)
            for (long i1 = b.lo[1]; i1 < b.hi[1]; ++i1)
                for (long i0 = b.lo[0]; i0 < b.hi[0]; ++i0)
                    visit(i0, i1, i2);
    }
    else
    {
        for (long i2 = b.hi[2] - 1; i2 >= b.lo[2]; --i2)
            for (long i1 = b.hi[1] - 1; i1 >= b.lo[1]; --i1)
                for (long i0 = b.hi[0] - 1; i0 >= b.lo[0]; --i0)
                    visit(i0, i1, i2);
    }
    if (grew)
        active_ = grown;
    return res;
}

double Engine::sweep_jacobi()
{
    LocalBox const b = sweep_box();
    if (b.empty(d_))
        return 0;
    // receivers: the sweep box plus one layer, clipped to the grid
    LocalBox r = b;
    for (int a = 0; a < d_; ++a)
    {
        r.lo[a] = std::max(b.lo[a] - 1, 0L);
        r.hi[a] = std::min(b.hi[a] + 1, n_[a]);
    }
    int const outer = d_ - 1;
    double const share_factor = 1.0 / (2 * d_);
    long const s1 = stride_[1], s2 = stride_[2];

    std::vector<double> chunk_res(pool_.size(), 0.0);
    std::vector<LocalBox> chunk_active(pool_.size(), active_);
    std::vector<char> chunk_grew(pool_.size(), 0);

    pool_.run(b.hi[outer] - b.lo[outer], [&](unsigned c, long begin, long end) {
        LocalBox sub = b;
        sub.lo[outer] = b.lo[outer] + begin;
        sub.hi[outer] = b.lo[outer] + end;
        double res = 0;
        LocalBox& grown = chunk_active[c];
        for (long i2 = sub.lo[2]; i2 < sub.hi[2]; ++i2)
        {
            for (long i1 = sub.lo[1]; i1 < sub.hi[1]; ++i1)
            {
                for (long i0 = sub.lo[0]; i0 < sub.hi[0]; ++i0)
                {
                    std::size_t const idx = at(i0, i1, i2);
                    double const excess = m_[idx] - 1;
                    double const t = excess > 0 ? excess : 0.0;
                    t_[idx] = t;
                    if (t > 0)
                    {
                        res = std::max(res, t);
                        u_[idx] += t;
                        Local const k{i0, i1, i2};
                        for (int a = 0; a < d_; ++a)
                        {
                            if (k[a] < grown.lo[a] || k[a] >= grown.hi[a])
                            {
                                grown.lo[a] = std::min(grown.lo[a], k[a]);
                                grown.hi[a] = std::max(grown.hi[a], k[a] + 1);
                                chunk_grew[c] = 1;
                            }
                        }
                    }
                }
            }
        }
        chunk_res[c] = res;
    });

    pool_.run(r.hi[outer] - r.lo[outer], [&](unsigned, long begin, long end) {
        LocalBox sub = r;
        sub.lo[outer] = r.lo[outer] + begin;
        sub.hi[outer] = r.lo[outer] + end;
        for (long i2 = sub.lo[2]; i2 < sub.hi[2]; ++i2)
        {
            for (long i1 = sub.lo[1]; i1 < sub.hi[1]; ++i1)
            {
                for (long i0 = sub.lo[0]; i0 < sub.hi[0]; ++i0)
                {
                    std::size_t const idx = at(i0, i1, i2);
                    double in = 0;
                    if (i0 > 0)
                        in += t_[idx - 1];
                    if (i0 + 1 < n_[0])
                        in += t_[idx + 1];
                    if (d_ > 1)
                    {
                        if (i1 > 0)
                            in += t_[idx - s1];
                        if (i1 + 1 < n_[1])
                            in += t_[idx + s1];
                    }
                    if (d_ > 2)
                    {
                        if (i2 > 0)
                            in += t_[idx - s2];
                        if (i2 + 1 < n_[2])
                            in += t_[idx + s2];
                    }
                    m_[idx] += in * share_factor - t_[idx];
                }
            }
        }
    });

    double res = 0;
    for (std::size_t c = 0; c < chunk_res.size(); ++c)
    {
        res = std::max(res, chunk_res[c]);
        if (chunk_grew[c])
        {
            for (int a = 0; a < d_; ++a)
            {
                active_.lo[a] = std::min(active_.lo[a], chunk_active[c].lo[a]);
                active_.hi[a] = std::max(active_.hi[a], chunk_active[c].hi[a]);
            }
        }
    }
    return res;
}

double Engine::residual() const
{
    LocalBox const b = sweep_box();
    if (b.empty(d_))
        return 0;
    double res = 0;
    for (long i2 = b.lo[2]; i2 < b.hi[2]; ++i2)
    {
        for (long i1 = b.lo[1]; i1 < b.hi[1]; ++i1)
        {
            for (long i0 = b.lo[0]; i0 < b.hi[0]; ++i0)
            {
                std::size_t const idx = at(i0, i1, i2);
                double const excess = m_[idx] - 1;
                if (excess > 0 || u_[idx] > 0)
                    res = std::max(res, std::abs(std::max(excess, -u_[idx])));
            }
        }
    }
    return res;
}

double Engine::edge_excess() const
{
    double worst = 0;
    for (long i2 = 0; i2 < n_[2]; ++i2)
    {
        for (long i1 = 0; i1 < n_[1]; ++i1)
        {
            for (long i0 = 0; i0 < n_[0]; ++i0)
            {
                Local const k{i0, i1, i2};
                bool edge = false;
                for (int a = 0; a < d_; ++a)
                    edge = edge || k[a] < interior_.lo[a] || k[a] >= interior_.hi[a];
                if (!edge)
                {
                    // jump over the interior run of this row
                    if (n_[0] > 2 && i0 == 0)
                        i0 = n_[0] - 2;
                    continue;
                }
                worst = std::max(worst, m_[at(i0, i1, i2)] - 1);
            }
        }
    }
    return worst;
}

double auto_kappa(DensityField const& w)
{
    int const d = w.grid().dim();
    double const mass = w.total_mass();
    if (!(mass > 0))
        return 1;
    double const radius = std::pow(mass / unit_ball_volume(d), 1.0 / d);
    double const span = 2 * radius / w.grid().h() + 2;
    double const k = 2 / (1 + std::sin(std::numbers::pi / span));
    return std::clamp(k, 1.0, 1.99);
}

long default_sweep_cap(int d)
{
    return 10'000'000L / d;
}

}  // namespace

//---------------------------------------------------------------------------//

char const* to_string(SweepOrder order)
{
    switch (order)
    {
        case SweepOrder::jacobi:
            return "jacobi";
        case SweepOrder::forward_lex:
            return "forward";
        case SweepOrder::backward_lex:
            return "backward";
    }
    return "?";
}

SweepOrder parse_sweep_order(std::string const& name)
{
    if (name == "jacobi")
        return SweepOrder::jacobi;
    if (name == "forward")
        return SweepOrder::forward_lex;
    if (name == "backward")
        return SweepOrder::backward_lex;
    throw ConfigError("unknown sweep order '" + name + "'");
}

char const* to_string(SizingPolicy policy)
{
    return policy == SizingPolicy::compact ? "compact" : "lemma";
}

unsigned default_thread_count()
{
    if (char const* env = std::getenv("SMASHLAB_THREADS"))
    {
        char* end = nullptr;
        long const v = std::strtol(env, &end, 10);
        if (end != env && v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SumResult smash_sum(DensityField const& w, StabilizeParams const& params)
{
    if (!(params.residual > 0) || !(params.full >= 0))
        throw ConfigError("smash_sum: tolerances must be positive");
    GridSpec const& g = w.grid();
    int const d = g.dim();

    Engine engine(w, params);
    double kappa = 1;
    if (params.order != SweepOrder::jacobi)
        kappa = params.kappa > 0 ? params.kappa : auto_kappa(w);
    if (!(kappa > 0 && kappa < 2))
        throw ConfigError("smash_sum: over-toppling factor must lie in (0, 2)");
    engine.set_kappa(kappa);

    long const cap = params.sweep_cap > 0 ? params.sweep_cap : default_sweep_cap(d);
    long sweeps = 0;
    double res = engine.residual();
    bool converged = res < params.residual;
    while (!converged && sweeps < cap)
    {
        double const seen = engine.sweep();
        ++sweeps;
        if (seen < params.residual)
        {
            res = engine.residual();
            converged = res < params.residual;
        }
        // plain toppling never un-topples, so outer mass is final
        if (kappa == 1 && (sweeps & 63) == 0
            && engine.edge_excess() > params.residual)
        {
            break;
        }
    }
    if (!converged)
        res = engine.residual();

    double const edge = engine.edge_excess();
    if (edge > params.residual)
    {
        std::ostringstream os;
        os << "smash_sum: mass " << 1 + edge
           << " reached the outer layer of grid " << g.describe()
           << "; enlarge the working box";
        throw BoundaryContact(os.str());
    }
    if (!converged && !params.allow_unconverged)
    {
        std::ostringstream os;
        os << "smash_sum: residual " << res << " after " << sweeps
           << " sweeps (cap " << cap << ")";
        throw NonConvergence(os.str());
    }

    SumResult out;
    out.final_field = DensityField(g);
    std::copy(engine.mass().begin(), engine.mass().end(),
              out.final_field.values().begin());
    out.odometer = DensityField(g);
    double const vol = g.cell_volume();
    auto const& u = engine.odometer();
    for (std::size_t i = 0; i < u.size(); ++i)
        out.odometer[i] = u[i] * vol;

    out.domain = Mask(g);
    for (std::size_t i = 0; i < w.size(); ++i)
        out.domain.set(i, out.final_field[i] >= 1 - params.full || w[i] > 0);

    out.residual = res;
    out.sweeps = sweeps;
    out.kappa = kappa;
    out.order = params.order;
    out.initial_mass = w.total_mass();
    out.final_mass = out.final_field.total_mass();
    out.mass_drift = out.initial_mass > 0
                         ? std::abs(out.final_mass - out.initial_mass) / out.initial_mass
                         : 0.0;
    out.converged = converged;
    return out;
}

std::pair<DensityField, double> topple_sweep(DensityField const& f, SweepOrder order)
{
    StabilizeParams p;
    p.order = order;
    p.threads = 1;
    Engine engine(f, p);
    engine.set_kappa(1);
    engine.activate_all();
    engine.sweep();
    DensityField out(f.grid());
    std::copy(engine.mass().begin(), engine.mass().end(), out.values().begin());
    double res = 0;
    for (std::size_t i = 0; i < out.size(); ++i)
        res = std::max(res, out[i] - 1);
    return {std::move(out), res};
}

SumResult smash_sum_on(std::span<Mask const> parts,
                       GridSpec const& grid,
                       StabilizeParams const& params)
{
    DensityField w(grid);
    for (auto const& p : parts)
        w.add(p.grid() == grid ? p : p.regrid(grid));
    return smash_sum(w, params);
}

SumResult smash_masks(std::span<Mask const> parts, StabilizeParams const& params)
{
    if (parts.empty())
        throw ConfigError("smash_masks: no parts");
    GridSpec const& lattice = parts.front().grid();
    int const d = lattice.dim();
    IndexBox hull;
    for (int a = 0; a < d; ++a)
        hull.hi[a] = hull.lo[a];
    double total = 0;
    for (auto const& p : parts)
    {
        if (!p.grid().same_lattice(lattice))
            throw ConfigError("smash_masks: parts live on different lattices");
        hull = hull.hull(p.bounds(), d);
        total += p.measure();
    }
    if (hull.empty(d))
    {
        // nothing to stabilize: keep a single-cell grid around the first part
        IndexBox one;
        for (int a = 0; a < d; ++a)
        {
            one.lo[a] = lattice.box().lo[a];
            one.hi[a] = one.lo[a] + 1;
        }
        return smash_sum(DensityField(lattice.window(one)), params);
    }
    double const radius = std::pow(total / unit_ball_volume(d), 1.0 / d);
    long margin = static_cast<long>(std::ceil(radius / lattice.h())) + 4;
    for (int attempt = 0;; ++attempt)
    {
        GridSpec const g = lattice.window(hull.expanded(margin, d));
        try
        {
            return smash_sum_on(parts, g, params);
        }
        catch (BoundaryContact const&)
        {
            if (attempt >= 4)
                throw;
            margin *= 2;
        }
    }
}

SumResult smash_pair(Mask const& a, Mask const& b, StabilizeParams const& params)
{
    std::array<Mask, 2> const parts{a, b};
    return smash_masks(parts, params);
}

GridSpec working_grid(std::span<ShapeExpr const> shapes, double h, SizingPolicy policy)
{
    if (shapes.empty())
        throw ConfigError("working_grid: no shapes");
    int const d = shapes.front()->dim;
    RealBox hull;
    double bbox_volume = 0;
    double rad = 0;
    for (auto const& s : shapes)
    {
        RealBox const b = bounding_box(s);
        rad = std::max(rad, radius_about_origin(s));
        if (b.empty)
            continue;
        double v = 1;
        for (int a = 0; a < d; ++a)
            v *= b.hi[a] - b.lo[a];
        bbox_volume += v;
        if (hull.empty)
        {
            hull = b;
            continue;
        }
        for (int a = 0; a < d; ++a)
        {
            hull.lo[a] = std::min(hull.lo[a], b.lo[a]);
            hull.hi[a] = std::max(hull.hi[a], b.hi[a]);
        }
    }
    if (hull.empty)
    {
        hull.empty = false;
        for (int a = 0; a < d; ++a)
        {
            hull.lo[a] = -h;
            hull.hi[a] = h;
        }
    }
    double pad = 4 * h;
    if (policy == SizingPolicy::compact)
        pad += std::pow(bbox_volume / unit_ball_volume(d), 1.0 / d);
    else
        pad += diameter_constant(d) * rad;
    Point lo = hull.lo, hi = hull.hi;
    for (int a = 0; a < d; ++a)
    {
        lo[a] -= pad;
        hi[a] += pad;
    }
    return GridSpec::covering(d, h, lo, hi);
}

AbelianReport abelian_check(DensityField const& w,
                            StabilizeParams const& a,
                            StabilizeParams const& b,
                            double tol)
{
    SumResult const ra = smash_sum(w, a);
    SumResult const rb = smash_sum(w, b);
    AbelianReport rep;
    rep.tolerance = tol;
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        rep.odometer_sup_diff = std::max(rep.odometer_sup_diff,
                                         std::abs(ra.odometer[i] - rb.odometer[i]));
    }
    rep.domain_diff_cells = symmetric_difference_count(ra.domain, rb.domain);
    rep.pass = rep.odometer_sup_diff <= tol && rep.domain_diff_cells == 0;
    return rep;
}

bool abelian_check(DensityField const& w,
                   SweepOrder a,
                   SweepOrder b,
                   double tol,
                   StabilizeParams const& base)
{
    StabilizeParams pa = base, pb = base;
    pa.order = a;
    pb.order = b;
    return abelian_check(w, pa, pb, tol).pass;
}

}  // namespace smashlab
