// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smashlab/scene.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "smashlab/errors.hpp"

namespace smashlab {

Scene parse_scene(nlohmann::json const& doc)
{
    if (!doc.is_object())
        throw ConfigError("scene: expected a JSON object");
    if (!doc.contains("dim") || !doc["dim"].is_number_integer())
        throw ConfigError("scene: missing integer 'dim'");
    if (!doc.contains("A") || !doc.contains("B"))
        throw ConfigError("scene: needs shapes 'A' and 'B'");
    Scene s;
    s.dim = doc["dim"].get<int>();
    if (s.dim < 1 || s.dim > 3)
        throw ConfigError("scene: dim must be 1, 2 or 3");
    s.name = doc.value("name", std::string("scene"));
    s.a = parse_shape(doc["A"], s.dim);
    s.b = parse_shape(doc["B"], s.dim);
    if (doc.contains("C"))
        s.c = parse_shape(doc["C"], s.dim);
    return s;
}

nlohmann::json scene_to_json(Scene const& scene)
{
    nlohmann::json doc;
    doc["name"] = scene.name;
    doc["dim"] = scene.dim;
    doc["A"] = shape_to_json(scene.a);
    doc["B"] = shape_to_json(scene.b);
    if (scene.c)
        doc["C"] = shape_to_json(*scene.c);
    return doc;
}

Scene load_scene(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("scene: cannot open " + path.string());
    nlohmann::json doc;
    try
    {
        in >> doc;
    }
    catch (nlohmann::json::exception const& e)
    {
        throw ConfigError("scene: " + path.string() + ": " + e.what());
    }
    return parse_scene(doc);
}

std::vector<Scene> standard_scenes()
{
    std::vector<Scene> out;
    out.push_back({"concentric",
                   2,
                   make_ball(2, {0, 0, 0}, 1),
                   make_ball(2, {0, 0, 0}, 1),
                   make_ball(2, {0.75, 0, 0}, 0.5)});
    out.push_back({"overlapping",
                   2,
                   make_ball(2, {-0.5, 0, 0}, 1),
                   make_ball(2, {0.5, 0, 0}, 1),
                   make_ball(2, {0, 0.75, 0}, 1)});
    out.push_back({"box_ball",
                   2,
                   make_box(2, {-1, -0.6, 0}, {0.2, 0.6, 0}),
                   make_ball(2, {0.4, 0.3, 0}, 0.7),
                   make_ball(2, {-0.2, -0.6, 0}, 0.5)});
    return out;
}

}  // namespace smashlab
