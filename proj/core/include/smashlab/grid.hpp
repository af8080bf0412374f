// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Uniform cell grids, boolean masks and density fields.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smashlab/errors.hpp"

namespace smashlab {

using Point = std::array<double, 3>;
using Index = std::array<long, 3>;

//! Integer cell box [lo, hi) on a lattice; unused axes have lo = 0, hi = 1.
struct IndexBox
{
    Index lo{0, 0, 0};
    Index hi{1, 1, 1};

    bool empty(int dim) const;
    bool contains(Index const& k, int dim) const;
    IndexBox expanded(long layers, int dim) const;
    IndexBox intersect(IndexBox const& other, int dim) const;
    IndexBox hull(IndexBox const& other, int dim) const;
    friend bool operator==(IndexBox const&, IndexBox const&) = default;
};

/*!
 * A rectangular window of cells on a lattice of spacing h.
 *
 * Cell with integer index k has its center at origin + (k + 1/2) h. Two grids
 * sharing dim, h and origin live on the same lattice, so masks can be cropped
 * and embedded between them without resampling.
 */
class GridSpec
{
  public:
    GridSpec() = default;
    GridSpec(int dim, double h, Point origin, IndexBox box);

    //! Grid over the real box [lo, hi], snapped outward to whole cells.
    static GridSpec covering(int dim, double h, Point lo, Point hi);

    int dim() const { return dim_; }
    double h() const { return h_; }
    Point const& origin() const { return origin_; }
    IndexBox const& box() const { return box_; }
    long extent(int axis) const { return box_.hi[axis] - box_.lo[axis]; }
    std::size_t size() const { return size_; }
    double cell_volume() const;

    Point lo() const;
    Point hi() const;

    //! Same lattice (dim, h, origin) as another grid.
    bool same_lattice(GridSpec const& other) const;
    bool operator==(GridSpec const& other) const;

    //! Window of this lattice restricted to a sub-box.
    GridSpec window(IndexBox const& b) const;

    std::size_t linear(Index const& k) const
    {
        return static_cast<std::size_t>(
            (k[0] - box_.lo[0])
            + extent(0)
                  * ((k[1] - box_.lo[1]) + extent(1) * (k[2] - box_.lo[2])));
    }
    Index index(std::size_t i) const;
    Point center(Index const& k) const;
    Point center(std::size_t i) const { return center(index(i)); }
    bool contains(Index const& k) const { return box_.contains(k, dim_); }

    //! Index of the cell whose center is x; throws if x is not a center.
    Index cell_at_center(Point const& x) const;
    //! Index of the cell containing x (no bounds check).
    Index cell_containing(Point const& x) const;

    //! Linear stride of an axis.
    std::size_t stride(int axis) const;

    std::string describe() const;

  private:
    int dim_ = 0;
    double h_ = 0;
    Point origin_{0, 0, 0};
    IndexBox box_;
    std::size_t size_ = 0;
};

/*!
 * Rasterized indicator of an open set: one boolean per cell.
 */
class Mask
{
  public:
    Mask() = default;
    explicit Mask(GridSpec grid, bool value = false);

    GridSpec const& grid() const { return grid_; }
    std::size_t size() const { return cells_.size(); }

    bool operator[](std::size_t i) const { return cells_[i] != 0; }
    void set(std::size_t i, bool v) { cells_[i] = v ? 1 : 0; }
    bool at(Index const& k) const
    {
        return grid_.contains(k) && cells_[grid_.linear(k)] != 0;
    }
    std::span<std::uint8_t const> cells() const { return cells_; }
    std::span<std::uint8_t> cells() { return cells_; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    double measure() const;

    //! Tight index box of the true cells; empty box when no cell is set.
    IndexBox bounds() const;

    //! Same cells on a different window of the same lattice. Throws if a
    //! true cell would fall outside the new window.
    Mask regrid(GridSpec const& target) const;
    //! Same cells on another window, dropping any that fall outside it.
    Mask cropped(GridSpec const& target) const;
    //! Crop to the bounding box of the true cells plus a margin.
    Mask tight(long margin = 0) const;

    //! Shift by a whole number of cells, keeping the grid.
    Mask shifted(Index const& by) const;

    Mask& operator|=(Mask const& other);
    Mask& operator&=(Mask const& other);
    //! Set difference (this \ other).
    Mask& operator-=(Mask const& other);
    friend Mask operator|(Mask a, Mask const& b) { return a |= b; }
    friend Mask operator&(Mask a, Mask const& b) { return a &= b; }
    friend Mask operator-(Mask a, Mask const& b) { return a -= b; }
    friend bool operator==(Mask const& a, Mask const& b);

    bool subset_of(Mask const& other) const;

  private:
    GridSpec grid_;
    std::vector<std::uint8_t> cells_;
};

//! Cells whose value differs from some axis neighbour (out-of-grid counts
//! as false). Counts both sides of every interface.
std::size_t boundary_cell_count(Mask const& m);

//! Number of cells in the symmetric difference; grids must match.
std::size_t symmetric_difference_count(Mask const& a, Mask const& b);
//! Number of cells in a \ b; grids must match.
std::size_t difference_count(Mask const& a, Mask const& b);

bool essentially_equal(Mask const& a, Mask const& b, std::size_t tol_cells);
bool essentially_contained(Mask const& a,
                           Mask const& b,
                           std::size_t tol_cells);

//! Default essential tolerance: three times the boundary cells of both.
std::size_t default_essential_tolerance(Mask const& a, Mask const& b);

/*!
 * Nonnegative mass density per cell.
 */
class DensityField
{
  public:
    DensityField() = default;
    explicit DensityField(GridSpec grid, double value = 0.0);

    GridSpec const& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<double const> values() const { return values_; }
    std::span<double> values() { return values_; }

    //! Add a mask's indicator (times weight).
    DensityField& add(Mask const& m, double weight = 1.0);

    //! Total mass: sum of densities times the cell volume.
    double total_mass() const;
    double max() const;
    Mask support() const;
    Mask above(double threshold) const;

    DensityField regrid(GridSpec const& target) const;

  private:
    GridSpec grid_;
    std::vector<double> values_;
};

//! Indicator weight of a sum of masks (all on one grid).
DensityField indicator_sum(std::span<Mask const> masks);

//! Deterministic pairwise summation.
double pairwise_sum(std::span<double const> v);

void require_same_grid(GridSpec const& a,
                       GridSpec const& b,
                       char const* context);

}  // namespace smashlab
