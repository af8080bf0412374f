// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Scenes: named pairs (or triples) of shapes read from JSON.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "smashlab/geometry.hpp"

namespace smashlab {

struct Scene
{
    std::string name;
    int dim = 2;
    ShapeExpr a;
    ShapeExpr b;
    //! Third operand for associativity and monotonicity checks.
    std::optional<ShapeExpr> c;
};

//! {"name", "dim", "A", "B", "C"?}; shapes use the parse_shape format.
Scene parse_scene(nlohmann::json const& doc);
nlohmann::json scene_to_json(Scene const& scene);
//! Throws ConfigError for unreadable files or malformed JSON.
Scene load_scene(std::filesystem::path const& path);

/*!
 * The three planar scenes the axiom suite runs on: concentric unit disks,
 * overlapping unit disks, and a box with a ball. Each has a third shape
 * overlapping both.
 */
std::vector<Scene> standard_scenes();

}  // namespace smashlab
