// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Divisible sandpile stabilization: the grid realization of A ⊕ B.

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smashlab/geometry.hpp"
#include "smashlab/grid.hpp"

namespace smashlab {

enum class SweepOrder
{
    jacobi,        //!< simultaneous update, read old / write new
    forward_lex,   //!< x fastest, increasing indices
    backward_lex,  //!< reverse of forward_lex
};

char const* to_string(SweepOrder order);
SweepOrder parse_sweep_order(std::string const& name);

struct StabilizeParams
{
    //! Stop when the largest projected toppling step is below this.
    double residual = 1e-10;
    //! Cells with final mass >= 1 - full count as part of the domain.
    double full = 1e-6;
    //! Allowed relative drift of total mass over a run.
    double mass = 1e-9;
    //! Sweep cap; 0 selects 10^7 / d.
    long sweep_cap = 0;
    SweepOrder order = SweepOrder::forward_lex;
    /*!
     * Over-toppling factor for sequential orders: a cell sends
     * kappa * (m - 1), projected so its odometer stays nonnegative.
     * kappa = 1 is plain toppling; 0 picks a factor from the expected
     * domain size. Ignored for Jacobi sweeps.
     */
    double kappa = 0;
    //! Worker threads for Jacobi sweeps; 0 reads SMASHLAB_THREADS.
    unsigned threads = 0;
    //! Return a partial result instead of throwing at the sweep cap.
    bool allow_unconverged = false;
};

struct SumResult
{
    Mask domain;
    //! Mass emitted by each cell (density times cell volume).
    DensityField odometer;
    DensityField final_field;
    double residual = 0;
    long sweeps = 0;
    double kappa = 1;
    SweepOrder order = SweepOrder::forward_lex;
    double initial_mass = 0;
    double final_mass = 0;
    //! |final - initial| / initial (0 for zero mass).
    double mass_drift = 0;
    bool converged = true;
};

/*!
 * Stabilize w: cells above 1 keep 1 and split the excess equally among
 * their 2d axis neighbours until the largest excess is below tolerance.
 *
 * The outermost layer of w's grid never topples; if it ends above
 * 1 + residual the grid was too small and BoundaryContact is thrown.
 */
SumResult smash_sum(DensityField const& w, StabilizeParams const& params = {});

//! One plain toppling pass over the whole grid.
std::pair<DensityField, double> topple_sweep(DensityField const& f,
                                             SweepOrder order);

//! Sum of indicator masks on one fixed grid (no automatic resizing).
SumResult smash_sum_on(std::span<Mask const> parts,
                       GridSpec const& grid,
                       StabilizeParams const& params = {});

/*!
 * Sum of indicator masks on a window of their common lattice.
 *
 * The window is the hull of the parts padded by the radius of a ball
 * holding the total mass plus four cells; on boundary contact the padding
 * doubles (up to four retries).
 */
SumResult smash_masks(std::span<Mask const> parts,
                      StabilizeParams const& params = {});

//! Convenience: A ⊕ B for two masks on one lattice.
SumResult smash_pair(Mask const& a, Mask const& b, StabilizeParams const& params = {});

enum class SizingPolicy
{
    //! hull of the shapes padded by the equal-mass ball radius + 4h
    compact,
    //! hull padded by N_d * rad(A ∪ B) + 4h (the diameter bound)
    lemma,
};

char const* to_string(SizingPolicy policy);

//! Working grid for summing shapes at cell width h.
GridSpec working_grid(std::span<ShapeExpr const> shapes, double h, SizingPolicy policy);

struct AbelianReport
{
    double odometer_sup_diff = 0;
    std::size_t domain_diff_cells = 0;
    double tolerance = 0;
    bool pass = false;
};

//! Stabilize under two parameter sets and compare odometers and domains.
AbelianReport abelian_check(DensityField const& w,
                            StabilizeParams const& a,
                            StabilizeParams const& b,
                            double tol);

//! Same, varying only the sweep order.
bool abelian_check(DensityField const& w,
                   SweepOrder a,
                   SweepOrder b,
                   double tol,
                   StabilizeParams const& base = {});

//! Threads requested by SMASHLAB_THREADS (at least 1).
unsigned default_thread_count();

}  // namespace smashlab
