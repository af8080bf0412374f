// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Symbolic shapes, rasterization, morphology and the cubic isometry group.

#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smashlab/grid.hpp"

namespace smashlab {

//---------------------------------------------------------------------------//
// Cubic isometries
//---------------------------------------------------------------------------//

/*!
 * Signed permutation of coordinates: (U v)_i = sign_i * v_{perm_i}.
 *
 * These are exactly the isometries fixing the cube [-1, 1]^d.
 */
struct IsometryElem
{
    int dim = 0;
    std::array<int, 3> perm{0, 1, 2};
    std::array<int, 3> sign{1, 1, 1};

    static IsometryElem identity(int dim);

    std::array<long, 3> apply(std::array<long, 3> const& v) const;
    Point apply(Point const& v) const;

    //! (this * other) v = this(other(v))
    IsometryElem compose(IsometryElem const& other) const;
    IsometryElem inverse() const;

    friend bool operator==(IsometryElem const&, IsometryElem const&) = default;
};

//! All 2^d d! cubic isometries, identity first.
std::vector<IsometryElem> cubic_isometries(int dim);

//! |H| = 2^d d!
int cubic_group_order(int dim);

//---------------------------------------------------------------------------//
// Shapes
//---------------------------------------------------------------------------//

struct ShapeNode;
using ShapeExpr = std::shared_ptr<ShapeNode const>;

//! Axis-aligned real box; used for bounding boxes of shape trees.
struct RealBox
{
    Point lo{0, 0, 0};
    Point hi{0, 0, 0};
    bool empty = true;
};

/*!
 * Node of a shape tree. Leaves are open balls and open boxes; internal nodes
 * combine or move their children. Every realized set is bounded and open.
 */
struct ShapeNode
{
    struct Ball
    {
        Point center;
        double radius;
    };
    struct Box
    {
        Point lo;
        Point hi;
    };
    struct Union
    {
        std::vector<ShapeExpr> parts;
    };
    struct Intersection
    {
        std::vector<ShapeExpr> parts;
    };
    struct Difference
    {
        ShapeExpr keep;
        ShapeExpr remove;
    };
    struct Translate
    {
        Point by;
        ShapeExpr of;
    };
    struct Isometry
    {
        IsometryElem element;
        Point about;
        ShapeExpr of;
    };

    int dim = 0;
    std::variant<Ball, Box, Union, Intersection, Difference, Translate, Isometry>
        node;
};

ShapeExpr make_ball(int dim, Point center, double radius);
ShapeExpr make_box(int dim, Point lo, Point hi);
ShapeExpr make_union(std::vector<ShapeExpr> parts);
ShapeExpr make_intersection(std::vector<ShapeExpr> parts);
ShapeExpr make_difference(ShapeExpr keep, ShapeExpr remove);
ShapeExpr make_translate(ShapeExpr of, Point by);
ShapeExpr make_isometry(ShapeExpr of, IsometryElem element, Point about);
//! The empty set (an empty union).
ShapeExpr make_empty(int dim);

//! Point membership in the realized open set.
bool contains(ShapeExpr const& s, Point const& p);

//! Conservative bounding box of the realized set.
RealBox bounding_box(ShapeExpr const& s);

//! sup |p| over the realized set (0 for the empty set); conservative.
double radius_about_origin(ShapeExpr const& s);

//! Parse the JSON shape document format.
ShapeExpr parse_shape(nlohmann::json const& doc, int dim);
nlohmann::json shape_to_json(ShapeExpr const& s);

//---------------------------------------------------------------------------//
// Rasterization and morphology
//---------------------------------------------------------------------------//

//! Cell-center sampling. Throws OutOfBounds naming the overflow direction if
//! the shape's bounding box leaves the grid box.
Mask rasterize(ShapeExpr const& shape, GridSpec const& grid);

inline double measure(Mask const& m)
{
    return m.measure();
}

//! Cells whose center lies within distance <= eps of some true cell center
//! (ties included, so eps = h reaches the axis neighbours). Throws
//! OutOfBounds if the dilation would spill past the grid.
Mask inflate(Mask const& m, double eps);

//! Cells for which every cell center within distance <= eps is true (cells
//! outside the grid count as false).
Mask deflate(Mask const& m, double eps);

//! Squared Euclidean distance (in cell units) from every cell center to the
//! nearest site; cells outside the grid are sites when outside_is_site.
std::vector<double> squared_distance_to(Mask const& sites, bool outside_is_site);

//! Image {x + U(y - x) : y in m}; x must be a cell center.
Mask apply_isometry_about(Mask const& m, IsometryElem const& u, Point const& x);

/*!
 * Cookie-cutter set B_R(x) ∩ ⋂_{U ∈ H} U_x A.
 *
 * The result lives on the odd-sided window of A's lattice centered on x that
 * contains B_R(x), so it is exactly symmetric under every U_x.
 */
Mask cookie_cutter(Point const& x, double radius, Mask const& table);

//! Same set without requiring x in the table (empty when the H-images of
//! the table share no cell near x).
Mask symmetric_core(Point const& x, double radius, Mask const& table);

//! Rasterized open ball {y : |y - x| < r} on a grid.
Mask ball_mask(GridSpec const& grid, Point const& x, double radius);

//! Centered odd-sided window around cell x containing B_r(x).
GridSpec centered_window(GridSpec const& lattice, Index const& x, double radius);

//! N_d = 2 / ((9/8)^{1/d} - 1).
double diameter_constant(int dim);

//! Volume of the unit ball in dimension d.
double unit_ball_volume(int dim);

}  // namespace smashlab
