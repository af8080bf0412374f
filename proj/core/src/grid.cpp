// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smashlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace smashlab {

//---------------------------------------------------------------------------//
// IndexBox
//---------------------------------------------------------------------------//

bool IndexBox::empty(int dim) const
{
    for (int a = 0; a < dim; ++a)
    {
        if (hi[a] <= lo[a])
            return true;
    }
    return false;
}

bool IndexBox::contains(Index const& k, int dim) const
{
    for (int a = 0; a < dim; ++a)
    {
        if (k[a] < lo[a] || k[a] >= hi[a])
            return false;
    }
    return true;
}

IndexBox IndexBox::expanded(long layers, int dim) const
{
    IndexBox r = *this;
    for (int a = 0; a < dim; ++a)
    {
        r.lo[a] -= layers;
        r.hi[a] += layers;
    }
    return r;
}

IndexBox IndexBox::intersect(IndexBox const& other, int dim) const
{
    IndexBox r = *this;
    for (int a = 0; a < dim; ++a)
    {
        r.lo[a] = std::max(lo[a], other.lo[a]);
        r.hi[a] = std::max(r.lo[a], std::min(hi[a], other.hi[a]));
    }
    return r;
}

IndexBox IndexBox::hull(IndexBox const& other, int dim) const
{
    if (empty(dim))
        return other;
    if (other.empty(dim))
        return *this;
    IndexBox r = *this;
    for (int a = 0; a < dim; ++a)
    {
        r.lo[a] = std::min(lo[a], other.lo[a]);
        r.hi[a] = std::max(hi[a], other.hi[a]);
    }
    return r;
}

//---------------------------------------------------------------------------//
// GridSpec
//---------------------------------------------------------------------------//

GridSpec::GridSpec(int dim, double h, Point origin, IndexBox box)
    : dim_(dim), h_(h), origin_(origin), box_(box)
{
    if (dim < 1 || dim > 3)
        throw ConfigError("grid dimension must be 1, 2 or 3");
    if (!(h > 0) || !std::isfinite(h))
        throw ConfigError("grid cell width must be positive");
    for (int a = dim; a < 3; ++a)
    {
        box_.lo[a] = 0;
        box_.hi[a] = 1;
        origin_[a] = 0;
    }
    if (box_.empty(dim))
        throw ConfigError("grid must have at least one cell per axis");
    size_ = 1;
    for (int a = 0; a < 3; ++a)
        size_ *= static_cast<std::size_t>(box_.hi[a] - box_.lo[a]);
}

GridSpec GridSpec::covering(int dim, double h, Point lo, Point hi)
{
    IndexBox b;
    for (int a = 0; a < dim; ++a)
    {
        b.lo[a] = static_cast<long>(std::floor(lo[a] / h + 1e-9));
        b.hi[a] = static_cast<long>(std::ceil(hi[a] / h - 1e-9));
        b.hi[a] = std::max(b.hi[a], b.lo[a] + 1);
    }
    return GridSpec(dim, h, Point{0, 0, 0}, b);
}

double GridSpec::cell_volume() const
{
    return std::pow(h_, dim_);
}

Point GridSpec::lo() const
{
    Point p{0, 0, 0};
    for (int a = 0; a < dim_; ++a)
        p[a] = origin_[a] + static_cast<double>(box_.lo[a]) * h_;
    return p;
}

Point GridSpec::hi() const
{
    Point p{0, 0, 0};
    for (int a = 0; a < dim_; ++a)
        p[a] = origin_[a] + static_cast<double>(box_.hi[a]) * h_;
    return p;
}

bool GridSpec::same_lattice(GridSpec const& other) const
{
    return dim_ == other.dim_ && h_ == other.h_ && origin_ == other.origin_;
}

bool GridSpec::operator==(GridSpec const& other) const
{
    return same_lattice(other) && box_ == other.box_;
}

GridSpec GridSpec::window(IndexBox const& b) const
{
    return GridSpec(dim_, h_, origin_, b);
}

Index GridSpec::index(std::size_t i) const
{
    Index k{0, 0, 0};
    auto const n0 = static_cast<std::size_t>(extent(0));
    auto const n1 = static_cast<std::size_t>(extent(1));
    k[0] = box_.lo[0] + static_cast<long>(i % n0);
    i /= n0;
    k[1] = box_.lo[1] + static_cast<long>(i % n1);
    k[2] = box_.lo[2] + static_cast<long>(i / n1);
    return k;
}

Point GridSpec::center(Index const& k) const
{
    Point p{0, 0, 0};
    for (int a = 0; a < dim_; ++a)
        p[a] = origin_[a] + (static_cast<double>(k[a]) + 0.5) * h_;
    return p;
}

Index GridSpec::cell_at_center(Point const& x) const
{
    Index k{0, 0, 0};
    for (int a = 0; a < dim_; ++a)
    {
        double const t = (x[a] - origin_[a]) / h_ - 0.5;
        double const r = std::round(t);
        if (std::abs(t - r) > 1e-6)
        {
            std::ostringstream os;
            os << "point is not a cell center (axis " << a << ")";
            throw ConfigError(os.str());
        }
        k[a] = static_cast<long>(r);
    }
    return k;
}

Index GridSpec::cell_containing(Point const& x) const
{
    Index k{0, 0, 0};
    for (int a = 0; a < dim_; ++a)
        k[a] = static_cast<long>(std::floor((x[a] - origin_[a]) / h_));
    return k;
}

std::size_t GridSpec::stride(int axis) const
{
    std::size_t s = 1;
    for (int a = 0; a < axis; ++a)
        s *= static_cast<std::size_t>(extent(a));
    return s;
}

std::string GridSpec::describe() const
{
    std::ostringstream os;
    os << "d=" << dim_ << " h=" << h_ << " cells=[";
    for (int a = 0; a < dim_; ++a)
        os << (a ? "x" : "") << extent(a);
    os << "]";
    return os.str();
}

void require_same_grid(GridSpec const& a, GridSpec const& b, char const* context)
{
    if (!(a == b))
    {
        throw ConfigError(std::string(context) + ": grid mismatch ("
                          + a.describe() + " vs " + b.describe() + ")");
    }
}

//---------------------------------------------------------------------------//
// Mask
//---------------------------------------------------------------------------//

Mask::Mask(GridSpec grid, bool value)
    : grid_(std::move(grid)), cells_(grid_.size(), value ? 1 : 0)
{
}

std::size_t Mask::count() const
{
    return static_cast<std::size_t>(
        std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

double Mask::measure() const
{
    return static_cast<double>(count()) * grid_.cell_volume();
}

IndexBox Mask::bounds() const
{
    int const d = grid_.dim();
    IndexBox b;
    bool any = false;
    for (std::size_t i = 0; i < cells_.size(); ++i)
    {
        if (!cells_[i])
            continue;
        Index const k = grid_.index(i);
        if (!any)
        {
            for (int a = 0; a < d; ++a)
            {
                b.lo[a] = k[a];
                b.hi[a] = k[a] + 1;
            }
            any = true;
            continue;
        }
        for (int a = 0; a < d; ++a)
        {
            b.lo[a] = std::min(b.lo[a], k[a]);
            b.hi[a] = std::max(b.hi[a], k[a] + 1);
        }
    }
    if (!any)
    {
        for (int a = 0; a < d; ++a)
            b.hi[a] = b.lo[a];
    }
    return b;
}

Mask Mask::regrid(GridSpec const& target) const
{
    Mask out = cropped(target);
    if (out.count() != count())
        throw OutOfBounds("regrid: true cells fall outside the target window");
    return out;
}

Mask Mask::cropped(GridSpec const& target) const
{
    if (!grid_.same_lattice(target))
        throw ConfigError("regrid: masks live on different lattices");
    Mask out(target);
    int const d = grid_.dim();
    IndexBox const common = grid_.box().intersect(target.box(), d);
    if (!common.empty(d))
    {
        Index k{0, 0, 0};
        for (k[2] = common.lo[2]; k[2] < common.hi[2]; ++k[2])
        {
            for (k[1] = common.lo[1]; k[1] < common.hi[1]; ++k[1])
            {
                std::size_t const src = grid_.linear({common.lo[0], k[1], k[2]});
                std::size_t const dst
                    = target.linear({common.lo[0], k[1], k[2]});
                auto const n = static_cast<std::size_t>(common.hi[0]
                                                        - common.lo[0]);
                std::copy_n(cells_.begin() + static_cast<long>(src),
                            n,
                            out.cells_.begin() + static_cast<long>(dst));
            }
        }
    }
    return out;
}

Mask Mask::tight(long margin) const
{
    IndexBox b = bounds();
    int const d = grid_.dim();
    if (b.empty(d))
    {
        // keep a single cell so the grid stays valid
        for (int a = 0; a < d; ++a)
            b.hi[a] = b.lo[a] + 1;
    }
    return regrid(grid_.window(b.expanded(margin, d)));
}

Mask Mask::shifted(Index const& by) const
{
    Mask out(grid_);
    for (std::size_t i = 0; i < cells_.size(); ++i)
    {
        if (!cells_[i])
            continue;
        Index k = grid_.index(i);
        for (int a = 0; a < grid_.dim(); ++a)
            k[a] += by[a];
        if (!grid_.contains(k))
            throw OutOfBounds("shift moves true cells outside the grid");
        out.cells_[grid_.linear(k)] = 1;
    }
    return out;
}

Mask& Mask::operator|=(Mask const& other)
{
    require_same_grid(grid_, other.grid_, "mask union");
    for (std::size_t i = 0; i < cells_.size(); ++i)
        cells_[i] |= other.cells_[i];
    return *this;
}

Mask& Mask::operator&=(Mask const& other)
{
    require_same_grid(grid_, other.grid_, "mask intersection");
    for (std::size_t i = 0; i < cells_.size(); ++i)
        cells_[i] &= other.cells_[i];
    return *this;
}

Mask& Mask::operator-=(Mask const& other)
{
    require_same_grid(grid_, other.grid_, "mask difference");
    for (std::size_t i = 0; i < cells_.size(); ++i)
        cells_[i] = cells_[i] && !other.cells_[i];
    return *this;
}

bool operator==(Mask const& a, Mask const& b)
{
    return a.grid_ == b.grid_ && a.cells_ == b.cells_;
}

bool Mask::subset_of(Mask const& other) const
{
    return difference_count(*this, other) == 0;
}

std::size_t boundary_cell_count(Mask const& m)
{
    GridSpec const& g = m.grid();
    int const d = g.dim();
    std::size_t n = 0;
    for (std::size_t i = 0; i < m.size(); ++i)
    {
        bool const v = m[i];
        Index const k = g.index(i);
        bool differs = false;
        for (int a = 0; a < d && !differs; ++a)
        {
            for (int s : {-1, 1})
            {
                Index nb = k;
                nb[a] += s;
                if (m.at(nb) != v)
                {
                    differs = true;
                    break;
                }
            }
        }
        n += differs ? 1 : 0;
    }
    return n;
}

std::size_t symmetric_difference_count(Mask const& a, Mask const& b)
{
    require_same_grid(a.grid(), b.grid(), "symmetric difference");
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        n += (a[i] != b[i]) ? 1 : 0;
    return n;
}

std::size_t difference_count(Mask const& a, Mask const& b)
{
    require_same_grid(a.grid(), b.grid(), "difference");
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        n += (a[i] && !b[i]) ? 1 : 0;
    return n;
}

bool essentially_equal(Mask const& a, Mask const& b, std::size_t tol_cells)
{
    return symmetric_difference_count(a, b) <= tol_cells;
}

bool essentially_contained(Mask const& a, Mask const& b, std::size_t tol_cells)
{
    return difference_count(a, b) <= tol_cells;
}

std::size_t default_essential_tolerance(Mask const& a, Mask const& b)
{
    return 3 * (boundary_cell_count(a) + boundary_cell_count(b));
}

//---------------------------------------------------------------------------//
// DensityField
//---------------------------------------------------------------------------//

DensityField::DensityField(GridSpec grid, double value)
    : grid_(std::move(grid)), values_(grid_.size(), value)
{
}

DensityField& DensityField::add(Mask const& m, double weight)
{
    require_same_grid(grid_, m.grid(), "density add");
    for (std::size_t i = 0; i < values_.size(); ++i)
    {
        if (m[i])
            values_[i] += weight;
    }
    return *this;
}

double DensityField::total_mass() const
{
    return pairwise_sum(values_) * grid_.cell_volume();
}

double DensityField::max() const
{
    double m = 0;
    for (double v : values_)
        m = std::max(m, v);
    return m;
}

Mask DensityField::support() const
{
    return above(0.0);
}

Mask DensityField::above(double threshold) const
{
    Mask m(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i)
        m.set(i, values_[i] > threshold);
    return m;
}

DensityField DensityField::regrid(GridSpec const& target) const
{
    if (!grid_.same_lattice(target))
        throw ConfigError("regrid: fields live on different lattices");
    DensityField out(target);
    int const d = grid_.dim();
    IndexBox const common = grid_.box().intersect(target.box(), d);
    double moved = 0;
    if (!common.empty(d))
    {
        Index k{0, 0, 0};
        for (k[2] = common.lo[2]; k[2] < common.hi[2]; ++k[2])
        {
            for (k[1] = common.lo[1]; k[1] < common.hi[1]; ++k[1])
            {
                for (k[0] = common.lo[0]; k[0] < common.hi[0]; ++k[0])
                {
                    double const v = values_[grid_.linear(k)];
                    out.values_[target.linear(k)] = v;
                    moved += v;
                }
            }
        }
    }
    double const total = pairwise_sum(values_);
    if (std::abs(moved - total) > 1e-12 * std::max(1.0, total))
    {
        throw OutOfBounds("regrid: mass falls outside the target window");
    }
    return out;
}

DensityField indicator_sum(std::span<Mask const> masks)
{
    if (masks.empty())
        throw ConfigError("indicator_sum needs at least one mask");
    DensityField w(masks.front().grid());
    for (Mask const& m : masks)
        w.add(m);
    return w;
}

double pairwise_sum(std::span<double const> v)
{
    if (v.size() <= 16)
    {
        double s = 0;
        for (double x : v)
            s += x;
        return s;
    }
    std::size_t const half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace smashlab
