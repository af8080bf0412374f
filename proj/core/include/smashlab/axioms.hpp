// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The smash-sum requirements as executable checks on computed sums.

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "smashlab/geometry.hpp"
#include "smashlab/sandpile.hpp"
#include "smashlab/scene.hpp"

namespace smashlab {

struct AxiomReport
{
    std::string name;
    std::string scene;
    std::string inputs;
    double h = 0;
    std::size_t cells = 0;  //!< discrepant cells
    double measure = 0;     //!< discrepancy as a measure
    std::size_t tolerance_cells = 0;
    //! Extra scalar metric (radius ratio, refinement ratio); NaN if unused.
    double value = std::numeric_limits<double>::quiet_NaN();
    //! Upper limit on value; NaN if value is informational.
    double limit = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    double seconds = 0;
    std::string note;
    //! Discrepant cells, when the check compares two masks.
    Mask diff;

    //! pass = cells <= tolerance_cells and (no limit or value <= limit).
    void finish();
};

//! |λ(A ⊕ B) - λ(A) - λ(B)| against the boundary cells of A, B and the sum.
AxiomReport check_mass(ShapeExpr const& a,
                       ShapeExpr const& b,
                       double h,
                       StabilizeParams const& solver = {});

//! (A ⊕ C) \ (B ⊕ C) within tolerance and A \ (A ⊕ C) empty. Needs A ⊆ B.
AxiomReport check_monotone(ShapeExpr const& a,
                           ShapeExpr const& b,
                           ShapeExpr const& c,
                           double h,
                           StabilizeParams const& solver = {});

//! A ⊕ B against B ⊕ A, bit for bit.
AxiomReport check_commute(ShapeExpr const& a,
                          ShapeExpr const& b,
                          double h,
                          StabilizeParams const& solver = {});

//! (A ⊕ B) ⊕ C against A ⊕ (B ⊕ C); inner domains are reused as
//! indicators. Tolerance: 3 x the boundary cells of A, B and C.
AxiomReport check_associate(ShapeExpr const& a,
                            ShapeExpr const& b,
                            ShapeExpr const& c,
                            double h,
                            StabilizeParams const& solver = {});

//! Associativity discrepancy measure at h/2 over that at h, limit 0.7.
AxiomReport check_associate_refinement(ShapeExpr const& a,
                                       ShapeExpr const& b,
                                       ShapeExpr const& c,
                                       double h,
                                       double max_ratio = 0.7,
                                       StabilizeParams const& solver = {});

//! Sum of the rasterized sets shifted by v cells against the shifted sum.
AxiomReport check_translate(ShapeExpr const& a,
                            ShapeExpr const& b,
                            Index const& v,
                            double h,
                            StabilizeParams const& solver = {});

//! U about the cell center nearest the origin, for each element given.
AxiomReport check_isometry(ShapeExpr const& a,
                           ShapeExpr const& b,
                           std::vector<IsometryElem> const& elements,
                           double h,
                           StabilizeParams const& solver = {});

//! inflate(A ⊕ B, eps) \ (A^eps ⊕ B^eps) within tolerance.
AxiomReport check_inflation_inclusion(ShapeExpr const& a,
                                      ShapeExpr const& b,
                                      double eps,
                                      double h,
                                      StabilizeParams const& solver = {});

//! B_r ⊕ B_r ⊆ B_{N_d r}; value = outer radius / r.
AxiomReport check_diameter(int dim, double r, double h, StabilizeParams const& solver = {});

//! For disjoint A and B the sum is A ∪ B, bit for bit.
AxiomReport check_disjoint(ShapeExpr const& a,
                           ShapeExpr const& b,
                           double h,
                           StabilizeParams const& solver = {});

std::vector<std::string> const& axiom_check_names();

struct SuiteOptions
{
    //! Grid widths; associativity refinement pairs each h with h/2.
    std::vector<double> h{1.0 / 64};
    //! Subset of axiom_check_names(); empty runs all.
    std::vector<std::string> checks;
    double inflation_eps = 0.25;
    double max_ratio = 0.7;
    StabilizeParams solver;
};

/*!
 * One named check on a scene. Scene-free checks (diameter) use the scene's
 * dimension; "disjoint" moves B well clear of A first.
 */
AxiomReport run_check(std::string const& name,
                      Scene const& scene,
                      double h,
                      SuiteOptions const& options = {});

/*!
 * Run the selected checks on every scene at every h. Scenes without a third
 * shape use B for C. Throws ConfigError for an unknown check name.
 */
std::vector<AxiomReport> run_axiom_suite(std::vector<Scene> const& scenes,
                                         SuiteOptions const& options = {});

}  // namespace smashlab
