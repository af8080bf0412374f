// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: sum, axioms, quadrature, game, converge.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smashlab/scene.hpp"

namespace smashlab::cli {

namespace fs = std::filesystem;

enum ExitCode : int
{
    exit_pass = 0,
    exit_check_failed = 1,
    exit_config = 2,
    exit_nonconvergence = 3,
};

struct RunConfig
{
    std::string command;
    //! Scenes from --scene or the config file; empty means the standard set.
    std::vector<Scene> scenes;
    std::vector<double> h;
    std::vector<std::string> h_labels;  //!< directory-safe, e.g. "1_64"
    fs::path out = "smashlab_out";
    std::vector<std::string> checks;
    //! Test function as config JSON; null means the command's default.
    nlohmann::json s_fn;
    std::optional<double> eps;
    std::optional<double> delta;
    bool snapshots = false;
};

/*!
 * "1/32,1/64" or "0.05,0.025". Values must be positive and strictly
 * decreasing. Throws ConfigError.
 */
std::vector<double> parse_h_list(std::string const& text);

//! "1_64" for 1/64, else the shortest decimal form.
std::string h_label(double h);

//! An id ("one", "newton", ...) or inline JSON.
nlohmann::json parse_s_fn(std::string const& text);

/*!
 * Overlay a JSON config ({"scene" | "scenes", "h", "checks", "s_fn",
 * "eps", "delta", "snapshots", "out"}) onto cfg. Scene entries may be
 * objects or paths relative to the config file.
 */
void apply_config_file(RunConfig& cfg, fs::path const& path);

int cmd_sum(RunConfig const& cfg, std::ostream& log);
int cmd_axioms(RunConfig const& cfg, std::ostream& log);
int cmd_quadrature(RunConfig const& cfg, std::ostream& log);
int cmd_game(RunConfig const& cfg, std::ostream& log);
int cmd_converge(RunConfig const& cfg, std::ostream& log);

//! Parse args (without the program name) and run; errors map to exit codes.
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

}  // namespace smashlab::cli
