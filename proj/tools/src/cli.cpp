// Copyright 2026 The smashlab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "smashlab/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "smashlab/axioms.hpp"
#include "smashlab/errors.hpp"
#include "smashlab/io.hpp"
#include "smashlab/quadrature.hpp"
#include "smashlab/sandpile.hpp"
#include "smashlab/smashgame.hpp"

namespace smashlab::cli {

namespace {

using Clock = std::chrono::steady_clock;
using nlohmann::json;

constexpr double default_sum_h = 1.0 / 64;
constexpr double default_game_h = 1.0 / 64;
constexpr double default_game_eps = 0.05;
constexpr double density_pgm_scale = 65535;
constexpr double converge_max_ratio = 0.7;

std::string trim(std::string s)
{
    auto const not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split_list(std::string const& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

double parse_number(std::string const& text)
{
    std::size_t used = 0;
    double v = 0;
    try
    {
        v = std::stod(text, &used);
    }
    catch (std::exception const&)
    {
        throw ConfigError("not a number: '" + text + "'");
    }
    if (used != text.size())
        throw ConfigError("not a number: '" + text + "'");
    return v;
}

double parse_h_value(std::string const& text)
{
    auto const slash = text.find('/');
    if (slash == std::string::npos)
        return parse_number(text);
    double const num = parse_number(trim(text.substr(0, slash)));
    double const den = parse_number(trim(text.substr(slash + 1)));
    if (den == 0)
        throw ConfigError("h: zero denominator in '" + text + "'");
    return num / den;
}

void check_h_list(std::vector<double> const& hs)
{
    if (hs.empty())
        throw ConfigError("h: empty list");
    for (std::size_t i = 0; i < hs.size(); ++i)
    {
        if (!(hs[i] > 0) || !std::isfinite(hs[i]))
            throw ConfigError("h: values must be positive");
        if (i > 0 && !(hs[i] < hs[i - 1]))
            throw ConfigError("h: values must be strictly decreasing");
    }
}

std::string timestamp()
{
    std::time_t const now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json runtime_section(Clock::time_point t0)
{
    return {{"finished", timestamp()},
            {"seconds", std::chrono::duration<double>(Clock::now() - t0).count()},
            {"threads", default_thread_count()}};
}

std::string fmt(double v)
{
    return format_number(v);
}

std::string fmt(bool v)
{
    return v ? "pass" : "fail";
}

std::string fmt(std::size_t v)
{
    return std::to_string(v);
}

json solver_json(StabilizeParams const& p)
{
    return {{"residual", p.residual},
            {"full", p.full},
            {"mass", p.mass},
            {"sweep_cap", p.sweep_cap},
            {"order", to_string(p.order)},
            {"kappa", p.kappa}};
}

json grid_json(GridSpec const& g)
{
    json box_lo = json::array();
    json box_hi = json::array();
    json origin = json::array();
    for (int a = 0; a < g.dim(); ++a)
    {
        box_lo.push_back(g.box().lo[a]);
        box_hi.push_back(g.box().hi[a]);
        origin.push_back(g.origin()[a]);
    }
    return {{"dim", g.dim()}, {"h", g.h()}, {"origin", origin}, {"lo", box_lo}, {"hi", box_hi}};
}

std::vector<double> hs_or(RunConfig const& cfg, double fallback)
{
    return cfg.h.empty() ? std::vector<double>{fallback} : cfg.h;
}

std::vector<Scene> scenes_or_standard(RunConfig const& cfg)
{
    return cfg.scenes.empty() ? standard_scenes() : cfg.scenes;
}

Scene const& single_scene(RunConfig const& cfg)
{
    if (cfg.scenes.empty())
        throw ConfigError(cfg.command + ": --scene is required");
    if (cfg.scenes.size() > 1)
        throw ConfigError(cfg.command + ": expected one scene, got "
                          + std::to_string(cfg.scenes.size()));
    return cfg.scenes.front();
}

json scenes_json(std::vector<Scene> const& scenes)
{
    json out = json::array();
    for (auto const& s : scenes)
        out.push_back(scene_to_json(s));
    return out;
}

Scene scene_entry(json const& entry, fs::path const& base)
{
    if (entry.is_string())
    {
        fs::path p = entry.get<std::string>();
        if (p.is_relative())
            p = base / p;
        return load_scene(p);
    }
    return parse_scene(entry);
}

std::vector<double> h_entries(json const& doc)
{
    std::vector<double> hs;
    if (doc.is_string())
        return parse_h_list(doc.get<std::string>());
    if (doc.is_number())
        hs.push_back(doc.get<double>());
    else if (doc.is_array())
    {
        for (auto const& e : doc)
        {
            if (e.is_string())
                hs.push_back(parse_h_value(e.get<std::string>()));
            else if (e.is_number())
                hs.push_back(e.get<double>());
            else
                throw ConfigError("config: h entries must be numbers or strings");
        }
    }
    else
        throw ConfigError("config: h must be a number, string or array");
    check_h_list(hs);
    return hs;
}

json default_game_s(int dim)
{
    json pole = json::array();
    for (int a = 0; a < dim; ++a)
        pole.push_back(a == 0 ? 1000.0 : 0.0);
    return {{"id", "mollified_newton"}, {"pole", pole}, {"rho", 0.25}};
}

//! Test function config completed with the defaults of its family.
json complete_s(json doc, int dim)
{
    if (doc.is_string())
        doc = json{{"id", doc}};
    auto const id = doc.value("id", std::string{});
    json const far = default_game_s(dim);
    bool const pole_family = id == "newton" || id == "neg_newton" || id == "mollified_newton"
                             || id == "neg_mollified_newton";
    if (pole_family && !doc.contains("pole"))
        doc["pole"] = far["pole"];
    if ((id == "mollified_newton" || id == "neg_mollified_newton") && !doc.contains("rho"))
        doc["rho"] = far["rho"];
    return doc;
}

void write_mask_diff(Mask const& m, fs::path const& path)
{
    if (m.size() == 0)
        return;
    write_pgm(m, path);
}

std::vector<std::string> read_string_list(json const& doc, char const* key)
{
    std::vector<std::string> out;
    if (doc.is_string())
        return split_list(doc.get<std::string>());
    if (!doc.is_array())
        throw ConfigError(std::string("config: '") + key + "' must be a list");
    for (auto const& e : doc)
        out.push_back(e.get<std::string>());
    return out;
}

}  // namespace

std::vector<double> parse_h_list(std::string const& text)
{
    std::vector<double> hs;
    for (auto const& item : split_list(text))
        hs.push_back(parse_h_value(item));
    check_h_list(hs);
    return hs;
}

std::string h_label(double h)
{
    double const inv = 1 / h;
    double const n = std::round(inv);
    if (n >= 1 && std::abs(inv - n) < 1e-9 * n)
        return "1_" + std::to_string(static_cast<long>(n));
    std::string s = format_number(h);
    std::replace(s.begin(), s.end(), '/', '_');
    return s;
}

json parse_s_fn(std::string const& text)
{
    std::string const t = trim(text);
    if (t.empty())
        throw ConfigError("--s-fn: empty");
    if (t.front() == '{')
    {
        try
        {
            return json::parse(t);
        }
        catch (json::exception const& e)
        {
            throw ConfigError(std::string("--s-fn: ") + e.what());
        }
    }
    return json{{"id", t}};
}

void apply_config_file(RunConfig& cfg, fs::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config '" + path.string() + "'");
    json doc;
    try
    {
        doc = json::parse(in);
    }
    catch (json::exception const& e)
    {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    if (!doc.is_object())
        throw ConfigError("config '" + path.string() + "': expected an object");
    fs::path const base = path.parent_path();
    try
    {
        if (doc.contains("scene"))
            cfg.scenes = {scene_entry(doc["scene"], base)};
        if (doc.contains("scenes"))
        {
            cfg.scenes.clear();
            for (auto const& e : doc["scenes"])
                cfg.scenes.push_back(scene_entry(e, base));
        }
        if (doc.contains("h"))
            cfg.h = h_entries(doc["h"]);
        if (doc.contains("checks"))
            cfg.checks = read_string_list(doc["checks"], "checks");
        if (doc.contains("s_fn"))
            cfg.s_fn = doc["s_fn"];
        if (doc.contains("eps"))
            cfg.eps = doc["eps"].get<double>();
        if (doc.contains("delta"))
            cfg.delta = doc["delta"].get<double>();
        if (doc.contains("snapshots"))
            cfg.snapshots = doc["snapshots"].get<bool>();
        if (doc.contains("out"))
            cfg.out = doc["out"].get<std::string>();
    }
    catch (json::exception const& e)
    {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
}

int cmd_sum(RunConfig const& cfg, std::ostream& log)
{
    Scene const& scene = single_scene(cfg);
    StabilizeParams const solver;
    for (double h : hs_or(cfg, default_sum_h))
    {
        auto const t0 = Clock::now();
        fs::path const dir = cfg.out / ("h" + h_label(h));
        std::vector<ShapeExpr> const shapes{scene.a, scene.b};
        GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
        std::vector<Mask> const parts{rasterize(scene.a, g), rasterize(scene.b, g)};
        SumResult const sum = smash_masks(parts, solver);
        write_pgm(sum.domain, dir / "domain.pgm");
        write_density_csv(sum.odometer, dir / "odometer.csv");
        write_pgm16(sum.final_field, dir / "final_density.pgm", density_pgm_scale);
        json manifest{
            {"command", "sum"},
            {"scene", scene_to_json(scene)},
            {"h", h},
            {"grid", grid_json(sum.domain.grid())},
            {"solver", solver_json(solver)},
            {"result",
             {{"residual", sum.residual},
              {"sweeps", sum.sweeps},
              {"kappa", sum.kappa},
              {"order", to_string(sum.order)},
              {"converged", sum.converged},
              {"initial_mass", sum.initial_mass},
              {"final_mass", sum.final_mass},
              {"mass_drift", sum.mass_drift},
              {"measure_a", parts[0].measure()},
              {"measure_b", parts[1].measure()},
              {"measure_sum", sum.domain.measure()},
              {"domain_cells", sum.domain.count()}}},
            {"files",
             {{"domain", "domain.pgm"},
              {"odometer", "odometer.csv (odometer in mass units)"},
              {"final_density", "final_density.pgm"},
              {"final_density_scale", density_pgm_scale}}},
            {"runtime", runtime_section(t0)},
        };
        write_json(manifest, dir / "manifest.json");
        log << "sum h=" << fmt(h) << " cells=" << sum.domain.count() << " sweeps=" << sum.sweeps
            << " drift=" << fmt(sum.mass_drift) << " -> " << dir.string() << "\n";
    }
    return exit_pass;
}

int cmd_axioms(RunConfig const& cfg, std::ostream& log)
{
    auto const t0 = Clock::now();
    SuiteOptions opts;
    opts.h = hs_or(cfg, opts.h.front());
    opts.checks = cfg.checks;
    if (cfg.eps)
        opts.inflation_eps = *cfg.eps;
    auto const scenes = scenes_or_standard(cfg);
    auto const reports = run_axiom_suite(scenes, opts);

    CsvWriter csv(cfg.out / "axioms.csv",
                  {"check", "scene", "h", "cells", "measure", "tolerance_cells", "value", "limit",
                   "result", "note"});
    bool all = true;
    for (auto const& r : reports)
    {
        csv.row({r.name, r.scene, fmt(r.h), fmt(r.cells), fmt(r.measure), fmt(r.tolerance_cells),
                 fmt(r.value), fmt(r.limit), fmt(r.pass), r.note});
        if (r.diff.count() > 0)
            write_mask_diff(r.diff,
                            cfg.out / "diff" / (r.name + "_" + r.scene + "_h" + h_label(r.h) + ".pgm"));
        all = all && r.pass;
        log << (r.pass ? "PASS " : "FAIL ") << r.name << " " << r.scene << " h=" << fmt(r.h)
            << " cells=" << r.cells << "/" << r.tolerance_cells << "\n";
    }
    json manifest{{"command", "axioms"},
                  {"scenes", scenes_json(scenes)},
                  {"h", opts.h},
                  {"checks", opts.checks.empty() ? axiom_check_names() : opts.checks},
                  {"inflation_eps", opts.inflation_eps},
                  {"max_ratio", opts.max_ratio},
                  {"tolerance_rule", "3 x boundary cells of the operands; commute, translate, isometry, "
                                     "disjoint exact"},
                  {"solver", solver_json(opts.solver)},
                  {"all_pass", all},
                  {"runtime", runtime_section(t0)}};
    write_json(manifest, cfg.out / "manifest.json");
    return all ? exit_pass : exit_check_failed;
}

int cmd_quadrature(RunConfig const& cfg, std::ostream& log)
{
    auto const t0 = Clock::now();
    auto const scenes = scenes_or_standard(cfg);
    auto const hs = hs_or(cfg, 1.0 / 64);
    CsvWriter csv(cfg.out / "quadrature.csv",
                  {"scene", "h", "index", "function", "harmonic", "slack", "tolerance", "result"});
    bool all = true;
    for (double h : hs)
    {
        for (auto const& scene : scenes)
        {
            std::vector<ShapeExpr> const shapes{scene.a, scene.b};
            GridSpec const g = working_grid(shapes, h, SizingPolicy::compact);
            Mask const a = rasterize(scene.a, g);
            Mask const b = rasterize(scene.b, g);
            SumResult const sum = smash_pair(a, b);
            DensityField w(sum.domain.grid());
            w.add(a.regrid(w.grid()));
            w.add(b.regrid(w.grid()));
            std::vector<TestFunction> fns;
            if (cfg.s_fn.is_null())
                fns = standard_test_functions(sum.domain);
            else
                fns.push_back(TestFunction::parse(complete_s(cfg.s_fn, scene.dim), scene.dim));
            for (std::size_t i = 0; i < fns.size(); ++i)
            {
                SlackRecord const r = check_slack(sum.domain, w, fns[i]);
                csv.row({scene.name, fmt(h), std::to_string(i), r.id, r.harmonic ? "yes" : "no",
                         fmt(r.slack), fmt(r.tolerance), fmt(r.pass)});
                all = all && r.pass;
                log << (r.pass ? "PASS " : "FAIL ") << scene.name << " h=" << fmt(h) << " "
                    << r.id << " slack=" << fmt(r.slack) << "\n";
            }
        }
    }
    json manifest{{"command", "quadrature"},
                  {"scenes", scenes_json(scenes)},
                  {"h", hs},
                  {"s_fn", cfg.s_fn.is_null() ? json("standard set") : cfg.s_fn},
                  {"pass_rule", "slack >= -tolerance; |slack| <= tolerance when harmonic"},
                  {"all_pass", all},
                  {"runtime", runtime_section(t0)}};
    write_json(manifest, cfg.out / "manifest.json");
    return all ? exit_pass : exit_check_failed;
}

int cmd_game(RunConfig const& cfg, std::ostream& log)
{
    auto const t0 = Clock::now();
    Scene const& scene = single_scene(cfg);
    if (cfg.h.size() > 1)
        throw ConfigError("game: expected one h, got " + std::to_string(cfg.h.size()));
    double const h = hs_or(cfg, default_game_h).front();
    json const s_doc = complete_s(cfg.s_fn.is_null() ? default_game_s(scene.dim) : cfg.s_fn,
                                  scene.dim);
    TestFunction const s = TestFunction::parse(s_doc, scene.dim);

    GameOptions opts;
    opts.eps = cfg.eps.value_or(default_game_eps);
    opts.delta = cfg.delta.value_or(0);
    opts.snapshots = cfg.snapshots;
    GameResult res;
    try
    {
        res = run_strategy(scene.a, scene.b, s, h, opts);
    }
    catch (GridTooCoarse const& e)
    {
        std::string const what = e.what();
        if (what.find("refine grid") != std::string::npos)
            throw;
        throw GridTooCoarse("refine grid: " + what);
    }

    CsvWriter rounds(cfg.out / "ledger.csv",
                     {"n", "R", "eta", "balls", "hand_mass", "sigma", "s_integral", "split_loss",
                      "shrink_loss", "rounding", "d_sigma", "d_sigma_shrink", "d_hand_deposit",
                      "corollary_lhs", "corollary_rhs", "corollary_slack", "corollary",
                      "current_sum_growth", "current_sum_tolerance", "current_sum"});
    for (auto const& r : res.rounds_log)
    {
        rounds.row({std::to_string(r.n), fmt(r.R), fmt(r.eta), fmt(r.balls), fmt(r.hand_mass),
                    fmt(r.sigma), fmt(r.s_integral), fmt(r.split_loss), fmt(r.shrink_loss),
                    fmt(r.rounding), fmt(r.d_sigma), fmt(r.d_sigma_shrink), fmt(r.d_hand_deposit),
                    fmt(r.corollary_lhs), fmt(r.corollary_rhs),
                    fmt(r.corollary_lhs - r.corollary_rhs), fmt(r.corollary_ok),
                    fmt(r.current_sum_growth), fmt(r.current_sum_tolerance),
                    fmt(r.current_sum_ok)});
    }
    CsvWriter moves(cfg.out / "moves.csv",
                    {"round", "kind", "center", "radius", "ball_radius", "mu", "nu", "balls",
                     "hand_mass_change", "mass_change", "sigma_change", "s_change",
                     "lemma_x_bound", "lemma_x", "lyapunov_lhs", "lyapunov_rhs", "lyapunov"});
    for (auto const& m : res.moves)
    {
        std::string center;
        for (int a = 0; a < scene.dim; ++a)
            center += (a ? " " : "") + fmt(m.center[a]);
        bool const cookie = m.kind == MoveKind::cookie_smash;
        moves.row({std::to_string(m.round), to_string(m.kind), center, fmt(m.radius),
                   fmt(m.ball_radius), fmt(m.mu), fmt(m.nu), fmt(m.balls),
                   fmt(m.hand_mass_change), fmt(m.mass_change), fmt(m.sigma_change),
                   fmt(m.s_change), cookie ? fmt(m.lemma_x_bound) : "",
                   cookie ? fmt(m.lemma_x_ok) : "", cookie ? fmt(m.lyapunov_lhs) : "",
                   cookie ? fmt(m.lyapunov_rhs) : "", cookie ? fmt(m.lyapunov_ok) : ""});
    }
    write_pgm(res.final_table, cfg.out / "final_table.pgm");
    for (std::size_t i = 0; i < res.snapshots.size(); ++i)
    {
        std::ostringstream name;
        name << "round_" << std::setw(3) << std::setfill('0') << i << ".pgm";
        write_pgm(res.snapshots[i], cfg.out / "snapshots" / name.str());
    }

    auto const& p = res.params;
    bool const checks_ok =
        res.all_lyapunov && res.all_lemma_x && res.all_corollary && res.all_current_sum;
    json manifest{
        {"command", "game"},
        {"scene", scene_to_json(scene)},
        {"h", h},
        {"s_fn", s_doc},
        {"s_offset", res.s.offset()},
        {"params",
         {{"eps", p.eps},
          {"delta", p.delta},
          {"cs", p.cs},
          {"Cs", p.Cs},
          {"N", p.N},
          {"lambda_b", p.lambda_b},
          {"rad_sum", p.rad_sum},
          {"sigma_b", p.sigma_b},
          {"slack", p.slack},
          {"min_ball_cells", p.min_ball_cells},
          {"round_bound", res.round_bound}}},
        {"result",
         {{"outcome", to_string(res.outcome)},
          {"reason", res.reason},
          {"rounds", res.rounds},
          {"initial_hand_mass", res.initial_hand_mass},
          {"final_hand_mass", res.final_hand_mass},
          {"mass_loss", res.mass_loss},
          {"s_increase", res.s_increase},
          {"max_sigma", res.max_sigma},
          {"cookie_smashes", res.cookie_smashes},
          {"lyapunov", res.all_lyapunov},
          {"lemma_x", res.all_lemma_x},
          {"corollary", res.all_corollary},
          {"current_sum", res.all_current_sum}}},
        {"runtime", runtime_section(t0)},
    };
    write_json(manifest, cfg.out / "manifest.json");
    log << "game " << to_string(res.outcome) << " after " << res.rounds << " rounds, hand mass "
        << fmt(res.final_hand_mass) << (res.reason.empty() ? "" : " (" + res.reason + ")") << "\n";
    return res.outcome == Outcome::won && checks_ok ? exit_pass : exit_check_failed;
}

int cmd_converge(RunConfig const& cfg, std::ostream& log)
{
    auto const t0 = Clock::now();
    auto const scenes = scenes_or_standard(cfg);
    auto const hs = hs_or(cfg, 1.0 / 32);
    std::vector<std::string> const checks =
        cfg.checks.empty() ? std::vector<std::string>{"mass", "associate"} : cfg.checks;
    SuiteOptions opts;
    if (cfg.eps)
        opts.inflation_eps = *cfg.eps;
    CsvWriter csv(cfg.out / "converge.csv",
                  {"check", "scene", "h", "discrepancy_h", "discrepancy_h2", "ratio", "limit",
                   "result"});
    bool all = true;
    for (auto const& check : checks)
    {
        for (auto const& scene : scenes)
        {
            for (double h : hs)
            {
                AxiomReport const coarse = run_check(check, scene, h, opts);
                AxiomReport const fine = run_check(check, scene, h / 2, opts);
                double ratio = 0;
                if (coarse.measure > 0)
                    ratio = fine.measure / coarse.measure;
                else if (fine.measure > 0)
                    ratio = std::numeric_limits<double>::infinity();
                bool const pass = ratio <= converge_max_ratio || fine.measure == 0;
                csv.row({check, coarse.scene, fmt(h), fmt(coarse.measure), fmt(fine.measure),
                         fmt(ratio), fmt(converge_max_ratio), fmt(pass)});
                all = all && pass;
                log << (pass ? "PASS " : "FAIL ") << check << " " << coarse.scene
                    << " h=" << fmt(h) << " ratio=" << fmt(ratio) << "\n";
            }
        }
    }
    json manifest{{"command", "converge"},
                  {"scenes", scenes_json(scenes)},
                  {"h", hs},
                  {"checks", checks},
                  {"max_ratio", converge_max_ratio},
                  {"max_ratio_note", "empirical target"},
                  {"inflation_eps", opts.inflation_eps},
                  {"all_pass", all},
                  {"runtime", runtime_section(t0)}};
    write_json(manifest, cfg.out / "manifest.json");
    return all ? exit_pass : exit_check_failed;
}

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"smashlab: smash sums on grids, their requirements, and the smash game"};
    app.set_help_flag("--help", "print this help");
    app.set_version_flag("--version", "smashlab 0.1.0");
    std::string command;
    std::string scene_path;
    std::string config_path;
    std::string h_text;
    std::string out_dir;
    std::string checks_text;
    std::string s_fn_text;
    double eps = 0;
    double delta = 0;
    bool snapshots = false;
    app.add_option("command", command, "sum | axioms | quadrature | game | converge")
        ->required()
        ->check(CLI::IsMember({"sum", "axioms", "quadrature", "game", "converge"}));
    auto* scene_opt = app.add_option("--scene", scene_path, "scene JSON file");
    auto* config_opt = app.add_option("--config", config_path, "run config JSON file");
    auto* h_opt = app.add_option("--h", h_text, "grid widths, e.g. 1/32,1/64");
    auto* out_opt = app.add_option("--out", out_dir, "output directory");
    auto* checks_opt = app.add_option("--checks", checks_text, "comma-separated check names");
    auto* s_opt = app.add_option("--s-fn", s_fn_text, "test function id or inline JSON");
    auto* eps_opt = app.add_option("--eps", eps, "game eps; inflation eps for axiom checks");
    auto* delta_opt = app.add_option("--delta", delta, "game margin delta");
    app.add_flag("--snapshots", snapshots, "write the table after every round");

    std::vector<char const*> argv{"smashlab"};
    for (auto const& a : args)
        argv.push_back(a.c_str());
    try
    {
        app.parse(static_cast<int>(argv.size()), argv.data());
    }
    catch (CLI::Success const& e)
    {
        return app.exit(e, out, err);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e, out, err);
        return exit_config;
    }

    try
    {
        RunConfig cfg;
        cfg.command = command;
        if (*config_opt)
            apply_config_file(cfg, config_path);
        if (*scene_opt)
            cfg.scenes = {load_scene(scene_path)};
        if (*h_opt)
            cfg.h = parse_h_list(h_text);
        if (*out_opt)
            cfg.out = out_dir;
        if (*checks_opt)
            cfg.checks = split_list(checks_text);
        if (*s_opt)
            cfg.s_fn = parse_s_fn(s_fn_text);
        if (*eps_opt)
            cfg.eps = eps;
        if (*delta_opt)
            cfg.delta = delta;
        cfg.snapshots = cfg.snapshots || snapshots;
        for (std::size_t i = 0; i < cfg.h.size(); ++i)
            cfg.h_labels.push_back(h_label(cfg.h[i]));

        std::error_code ec;
        fs::create_directories(cfg.out, ec);
        if (ec || !fs::is_directory(cfg.out))
            throw ConfigError("cannot create output directory '" + cfg.out.string() + "'");

        if (command == "sum")
            return cmd_sum(cfg, out);
        if (command == "axioms")
            return cmd_axioms(cfg, out);
        if (command == "quadrature")
            return cmd_quadrature(cfg, out);
        if (command == "game")
            return cmd_game(cfg, out);
        return cmd_converge(cfg, out);
    }
    catch (NonConvergence const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_nonconvergence;
    }
    catch (GridTooCoarse const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
    catch (Error const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
    catch (nlohmann::json::exception const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
    catch (fs::filesystem_error const& e)
    {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
}

}  // namespace smashlab::cli
