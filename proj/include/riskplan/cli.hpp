#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "riskplan/bench.hpp"
#include "riskplan/config.hpp"
#include "riskplan/io.hpp"
#include "riskplan/pipeline.hpp"
#include "riskplan/render.hpp"
#include "riskplan/sim.hpp"

namespace riskplan::cli {

namespace fs = std::filesystem;

// Malformed invocation; exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

inline Vec2 parse_point(const std::string& text, const std::string& flag) {
  const auto toks = split(text, ',');
  if (toks.size() != 2) throw UsageError(flag + ": expected x,y but got '" + text + "'");
  try {
    return {parse_number(toks[0], flag), parse_number(toks[1], flag)};
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

inline std::string show_point(const Vec2& p) { return fmt_double(p.x) + "," + fmt_double(p.y); }

/// Options shared by every subcommand. Layering: defaults, then --config,
/// then --set, then the subcommand's own flags.
struct ConfigOptions {
  std::string config_file;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, ConfigValue>> flags;

  void add_to(CLI::App* sub) {
    sub->add_option("--config", config_file, "TOML config file overriding the defaults");
    sub->add_option("--set", sets, "override one key, e.g. --set sampling.dt=0.2 (repeatable)")
        ->allow_extra_args(false);
  }

  void flag(const std::string& key, ConfigValue v) { flags.emplace_back(key, std::move(v)); }

  PlannerConfig resolve(const std::vector<std::pair<std::string, json>>& json_layers = {}) const {
    PlannerConfig cfg;
    if (!config_file.empty()) load_toml_config(cfg, config_file);
    for (const auto& [source, j] : json_layers) apply_json_config(cfg, j, source);
    try {
      for (const auto& s : sets) apply_assignment(cfg, s);
      for (const auto& [k, v] : flags) apply_setting(cfg, k, v);
      validate_config(cfg);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

inline std::vector<std::string> header(const PlannerConfig& cfg, const std::vector<std::string>& extra) {
  std::vector<std::string> lines = extra;
  for (auto& l : config_lines(cfg)) lines.push_back("config " + l);
  return lines;
}

// ---- map ----------------------------------------------------------------

struct MapCmd {
  ConfigOptions cfg;
  std::string scene, out;
  bool random = false;
  std::uint64_t seed = 1;
  int width = 200, height = 200;
  std::vector<double> strides;
  std::optional<double> lambda;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("map", "rasterize a scene (or a seeded random map) into an uncertainty pyramid");
    cfg.add_to(sub);
    sub->add_option("--scene", scene, "scene JSON");
    sub->add_flag("--random", random, "generate a seeded random map instead of reading a scene");
    sub->add_option("--seed", seed, "random map seed");
    sub->add_option("--width", width, "random map width in cells")->check(CLI::PositiveNumber);
    sub->add_option("--height", height, "random map height in cells")->check(CLI::PositiveNumber);
    sub->add_option("--strides", strides, "layer strides in meters, finest first")->delimiter(',');
    sub->add_option("--lambda", lambda, "mixed pooling weight of the max term");
    sub->add_option("--out", out, "output directory")->required();
  }

  int run(std::ostream& os) {
    if (random == !scene.empty()) throw UsageError("map: give exactly one of --scene or --random");
    if (!strides.empty()) cfg.flag("map.strides", strides);
    if (lambda) cfg.flag("map.lambda", *lambda);
    const PlannerConfig c = cfg.resolve();
    MapPyramid pyr;
    std::vector<std::string> extra;
    if (random) {
      RandomMapParams p;
      p.width = width;
      p.height = height;
      p.cell_size = c.map.strides.front();
      p.seed = seed;
      p.u_cap = c.map.u_cap;
      extra.push_back("random " + p.describe());
      pyr = build_pyramid_from_map(random_uncertainty_map(p), c.map.strides, c.map.lambda);
    } else {
      const RiskScene sc = load_scene(scene);
      extra.push_back("scene " + scene);
      const FieldRaster raster = rasterize_static(sc, c.map.strides.front(), c.global.threads);
      fs::create_directories(out);
      write_text(fs::path(out) / "field.csv", raster_to_csv(raster, header(c, extra)));
      write_text(fs::path(out) / "field.pgm", raster_to_pgm(raster));
      pyr = build_pyramid(raster, c.map.strides, c.map.lambda, effective_block_threshold(sc, c.map), c.map.u_cap);
    }
    save_pyramid_dir(out, pyr, header(c, extra));
    os << "map: " << pyr.depth() << " layers, fine " << pyr.fine().width << "x" << pyr.fine().height << " -> "
       << out << "\n";
    return kExitOk;
  }
};

// ---- global -------------------------------------------------------------

struct GlobalCmd {
  ConfigOptions cfg;
  std::string map_dir, scene, start, goal, algo = "c2f", out, stats;
  bool no_pin = false;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("global", "plan a global path on an uncertainty pyramid");
    cfg.add_to(sub);
    sub->add_option("--map", map_dir, "map directory written by 'planner map'");
    sub->add_option("--scene", scene, "scene JSON (pyramid built with the configured strides)");
    sub->add_option("--start", start, "start x,y in meters")->required();
    sub->add_option("--goal", goal, "goal x,y in meters")->required();
    sub->add_option("--algo", algo, "c2f | iastar | tastar")->check(CLI::IsMember({"c2f", "iastar", "tastar"}));
    sub->add_option("--out", out, "path CSV")->required();
    sub->add_option("--stats", stats, "stats JSON (default: <out>.stats.json)");
    sub->add_flag("--no-pin", no_pin, "keep the snapped cell centers as endpoints instead of the exact start/goal");
  }

  int run(std::ostream& os) {
    if (map_dir.empty() == scene.empty()) throw UsageError("global: give exactly one of --map or --scene");
    const Vec2 s = parse_point(start, "--start"), g = parse_point(goal, "--goal");
    const PlannerConfig c = cfg.resolve();
    const MapPyramid pyr = map_dir.empty() ? build_scene_pyramid(load_scene(scene), c.map, c.global.threads)
                                           : load_pyramid_dir(map_dir);
    const GlobalAlgo a = parse_algo(algo);
    const PlanResult res = plan_global(s, g, pyr, a, c.global);
    std::vector<std::string> extra = {"global algo=" + algo + " start=" + show_point(s) + " goal=" + show_point(g),
                                      "map " + (map_dir.empty() ? scene : map_dir) + " strides=" +
                                          detail::show_list(pyr.strides) + " lambda=" + fmt_double(pyr.lambda)};
    extra.push_back(no_pin ? "endpoints: snapped cell centers" : "endpoints: pinned to start and goal");
    write_text(out, path_to_csv(no_pin ? res.path.nodes : pin_endpoints(res.path.nodes, s, g), header(c, extra)));
    json j = stats_to_json(res.stats);
    j["algo"] = algo;
    write_text(stats.empty() ? out + ".stats.json" : stats, j.dump(2) + "\n");
    os << j.dump() << "\n";
    return kExitOk;
  }
};

// ---- smooth -------------------------------------------------------------

struct SmoothCmd {
  ConfigOptions cfg;
  std::string in, out, reference;
  std::optional<double> s_s;
  std::optional<double> n_o, n_b;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("smooth", "rolling-window QP smoothing of a path CSV");
    cfg.add_to(sub);
    sub->add_option("--in", in, "input path CSV (x_m,y_m)")->required();
    sub->add_option("--out", out, "smoothed path CSV")->required();
    sub->add_option("--s-s", s_s, "box side length around each reference node (m)");
    sub->add_option("--no", n_o, "nodes per optimization window");
    sub->add_option("--nb", n_b, "nodes kept pinned from the previous window");
    sub->add_option("--reference", reference, "also write the arclength reference (x_m,y_m,s,theta,c)");
  }

  int run(std::ostream& os) {
    if (s_s) cfg.flag("smoother.s_s", *s_s);
    if (n_o) cfg.flag("smoother.n_o", *n_o);
    if (n_b) cfg.flag("smoother.n_b", *n_b);
    const PlannerConfig c = cfg.resolve();
    const auto nodes = path_from_csv(read_text(in), in);
    const SmoothedPath sm = rolling_smooth(nodes, c.smoother);
    std::vector<std::string> extra = {"smooth in=" + in + " windows=" + std::to_string(sm.windows) +
                                      " max_kkt_residual=" + fmt_double(sm.max_kkt_residual)};
    write_text(out, path_to_csv(sm.nodes, header(c, extra)));
    if (!reference.empty())
      write_text(reference, reference_to_csv(build_reference(sm.nodes, c.reference_ds), header(c, extra)));
    os << "smooth: " << nodes.size() << " nodes, " << sm.windows << " windows, max KKT residual "
       << fmt_double(sm.max_kkt_residual) << "\n";
    return kExitOk;
  }
};

// ---- local --------------------------------------------------------------

// The path is extended past its end so the lattice near the goal stays on it.
inline ReferencePath reference_from_nodes(const std::vector<Vec2>& nodes, const PlannerConfig& c) {
  return build_reference(extend_path(nodes, lookahead_length(c.local)), c.reference_ds);
}

inline std::string candidates_to_csv(const std::vector<CandidateTrajectory>& cands,
                                     const std::vector<std::string>& comments) {
  std::string out = comment_block(comments) +
                    "id,duration,d_end,s_end,v_end,feasible,violation,violation_t,J_s,J_t,J_e,J_c,J\n";
  for (const auto& c : cands) {
    out += std::to_string(c.id) + "," + fmt_double(c.duration) + "," + fmt_double(c.terminal.d) + "," +
           fmt_double(c.terminal.s) + "," + fmt_double(c.terminal.s_d) + "," + (c.feasible ? "1" : "0") + ",";
    if (c.violation) out += std::string(to_string(*c.violation)) + "," + fmt_double(c.points[c.violation_point].t);
    else out += ",";
    if (c.feasible)
      out += "," + fmt_double(c.cost.j_s) + "," + fmt_double(c.cost.j_t) + "," + fmt_double(c.cost.j_e) + "," +
             fmt_double(c.cost.j_c) + "," + fmt_double(c.cost.total);
    else out += ",,,,,";
    out += "\n";
  }
  return out;
}

struct LocalCmd {
  ConfigOptions cfg;
  std::string ref, scene, spec, out, start;
  std::optional<double> speed;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("local", "one sampling-planner step along a reference path");
    cfg.add_to(sub);
    sub->add_option("--ref", ref, "reference path CSV (x_m,y_m)")->required();
    sub->add_option("--scene", scene, "scene JSON with obstacles (default: none)");
    sub->add_option("--spec", spec, "JSON with sampling/constraints/weights sections");
    sub->add_option("--out", out, "output directory")->required();
    sub->add_option("--start", start, "vehicle position x,y (default: first reference node)");
    sub->add_option("--speed", speed, "current speed in m/s (default: target speed)");
  }

  int run(std::ostream& os) {
    std::vector<std::pair<std::string, json>> layers;
    if (!spec.empty()) layers.emplace_back(spec, parse_json(read_text(spec), spec));
    PlannerConfig c = cfg.resolve(layers);
    RiskScene sc;
    if (!scene.empty()) sc = load_scene(scene);
    c.local.field_weights = sc.field_weights;

    const auto nodes = path_from_csv(read_text(ref), ref);
    const ReferencePath rp = reference_from_nodes(nodes, c);
    const Vec2 p = start.empty() ? nodes.front() : parse_point(start, "--start");
    const FrenetPoint fp = world_to_frenet(rp, p);
    FrenetState cur;
    cur.s = fp.s;
    cur.d = fp.d;
    cur.s_d = speed.value_or(c.local.sampling.v_ref);

    LocalPlanner planner(rp, c.local);
    const PlanStepResult res = planner.plan_step(cur, sc.obstacles);
    std::size_t feasible = 0;
    for (const auto& cand : res.candidates) feasible += cand.feasible ? 1 : 0;
    const std::vector<std::string> extra = {"local ref=" + ref + " start=" + show_point(p) +
                                            " speed=" + fmt_double(cur.s_d)};
    const auto hdr = header(c, extra);
    fs::create_directories(out);
    write_text(fs::path(out) / "best.csv", trajectory_to_csv(res.best, hdr));
    write_text(fs::path(out) / "candidates.csv", candidates_to_csv(res.candidates, hdr));
    write_text(fs::path(out) / "reference.csv", reference_to_csv(rp, hdr));
    json rej;
    for (std::size_t k = 0; k < kConstraintCount; ++k) rej[to_string(static_cast<Constraint>(k))] = res.rejections[k];
    const json summary = {{"config", hdr},
                          {"best_id", res.best.id},
                          {"best_cost", res.best.cost.total},
                          {"candidates", res.candidates.size()},
                          {"feasible", feasible},
                          {"dropped", res.dropped},
                          {"rejections", rej},
                          {"target", frenet_to_json(res.target)}};
    write_text(fs::path(out) / "summary.json", summary.dump(2) + "\n");
    os << "local: " << res.candidates.size() << " candidates, " << feasible << " feasible, best id "
       << res.best.id << " J=" << fmt_double(res.best.cost.total) << "\n";
    return kExitOk;
  }
};

// ---- sim / render -------------------------------------------------------

inline void write_renders(const fs::path& dir, const Scenario& sc, const ReferencePath& ref, const EpisodeLog& log,
                          const std::vector<std::vector<CandidateTrajectory>>& cands, std::size_t every) {
  fs::create_directories(dir);
  write_text(dir / "overview.svg", render_overview_svg(sc, ref, log));
  if (every == 0) return;
  for (std::size_t i = 0; i < log.ticks.size(); i += every) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.ppm", i);
    write_text(dir / name, render_frame(sc, ref, log.ticks[i], i < cands.size() ? &cands[i] : nullptr,
                                        sc.scene.field_weights));
  }
}

struct SimCmd {
  ConfigOptions cfg;
  std::string scenario, out, render, ref;
  std::size_t every = 10;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("sim", "closed-loop episode: replan, advance, repeat");
    cfg.add_to(sub);
    sub->add_option("--scenario", scenario, "scenario JSON")->required();
    sub->add_option("--ref", ref, "reference path CSV overriding the scenario's own");
    sub->add_option("--out", out, "episode log (JSON lines); default: <scenario name>.jsonl");
    sub->add_option("--render", render, "directory for overview.svg and PPM frames");
    sub->add_option("--frame-every", every, "render every n-th tick (0: overview only)");
  }

  int run(std::ostream& os) {
    const PlannerConfig c = cfg.resolve();
    const Scenario sc = load_scenario(scenario);
    // An external path is pinned to the scenario's start and goal, as the
    // built-in pipeline does.
    const ReferencePath rp =
        ref.empty() ? scenario_reference(sc, c)
                    : reference_from_nodes(pin_endpoints(path_from_csv(read_text(ref), ref), sc.start, sc.goal), c);
    std::vector<std::vector<CandidateTrajectory>> cands;
    const EpisodeLog log = run_episode(sc, rp, c.local, render.empty() ? nullptr : &cands);
    auto hdr = header(c, {"sim scenario=" + sc.name + (ref.empty() ? "" : " ref=" + fs::path(ref).filename().string())});
    write_text(out.empty() ? sc.name + ".jsonl" : out, episode_to_jsonl(log, hdr));
    if (!render.empty()) write_renders(render, sc, rp, log, cands, every);

    const auto issues = audit_episode(log, c.local.constraints);
    const double rate = log.planning_wall_s > 0.0 ? log.plan_calls / log.planning_wall_s : 0.0;
    os << "sim: " << sc.name << " " << to_string(log.termination) << " t=" << fmt_fixed(log.end_time, 2)
       << " ticks=" << log.ticks.size() << " max_e=" << fmt_fixed(log.max_field, 4)
       << " plans_per_s=" << fmt_fixed(rate, 1) << " audit_issues=" << issues.size() << "\n";
    if (!log.reached_goal())
      throw Error(log.termination == Termination::kNoFeasibleTrajectory ? ErrorCode::kNoFeasibleTrajectory
                                                                        : ErrorCode::kUnreachable,
                  sc.name + ": goal not reached (" + to_string(log.termination) + ")" +
                      (log.detail.empty() ? "" : ": " + log.detail));
    return kExitOk;
  }
};

struct RenderCmd {
  ConfigOptions cfg;
  std::string scenario, map_dir, out;
  std::vector<std::string> paths;
  std::size_t every = 10;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("render", "figures: a scenario episode, or global paths over a map");
    cfg.add_to(sub);
    sub->add_option("--scenario", scenario, "scenario JSON; writes overview.svg and frames into --out");
    sub->add_option("--map", map_dir, "map directory; draws --path files into the SVG given by --out");
    sub->add_option("--path", paths, "path CSV to overlay (repeatable)")->allow_extra_args(false);
    sub->add_option("--frame-every", every, "render every n-th tick (0: overview only)");
    sub->add_option("--out", out, "output directory (scenario) or SVG file (map)")->required();
  }

  int run(std::ostream& os) {
    if (scenario.empty() == map_dir.empty()) throw UsageError("render: give exactly one of --scenario or --map");
    const PlannerConfig c = cfg.resolve();
    if (!scenario.empty()) {
      const Scenario sc = load_scenario(scenario);
      const ReferencePath ref = scenario_reference(sc, c);
      std::vector<std::vector<CandidateTrajectory>> cands;
      const EpisodeLog log = run_episode(sc, ref, c.local, &cands);
      write_renders(out, sc, ref, log, cands, every);
      os << "render: " << sc.name << " -> " << out << "\n";
      return kExitOk;
    }
    const MapPyramid pyr = load_pyramid_dir(map_dir);
    std::vector<std::vector<Vec2>> polylines;
    for (const auto& p : paths) polylines.push_back(path_from_csv(read_text(p), p));
    write_text(out, render_paths_svg(pyr.fine(), polylines,
                                     {kWinnerColor, kReferenceColor, kVehicleColor, kObstacleColor}));
    os << "render: " << polylines.size() << " paths -> " << out << "\n";
    return kExitOk;
  }
};

// ---- bench --------------------------------------------------------------

struct BenchCmd {
  ConfigOptions cfg;
  std::vector<std::string> maps;
  std::string pairs, out;
  int random = 0;
  std::uint64_t seed = 1;
  int repeats = 3;
  bool parallel = false;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("bench", "T-A*, I-A* and Coarse2fine A* on shared maps and start/goal pairs");
    cfg.add_to(sub);
    sub->add_option("--map", maps, "map directory (repeatable)")->allow_extra_args(false);
    sub->add_option("--random", random, "number of seeded random 200x200 maps")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "seed of the first random map; later maps use seed+1, ...");
    sub->add_option("--pairs", pairs, "start/goal CSV (default: the 10 built-in pairs)");
    sub->add_option("--repeats", repeats, "timing repeats per run; the median is kept")->check(CLI::PositiveNumber);
    sub->add_flag("--parallel", parallel, "run maps concurrently (timings are then not comparable)");
    sub->add_option("--out", out, "report prefix; writes <out>.json, <out>.csv and <out>.md")->required();
  }

  int run(std::ostream& os) {
    if (maps.empty() && random == 0) throw UsageError("bench: give --map and/or --random");
    const PlannerConfig c = cfg.resolve();
    const std::vector<PairSpec> pr = pairs.empty() ? default_pairs() : pairs_from_csv(read_text(pairs), pairs);

    struct Job {
      std::string name;
      std::optional<RandomMapParams> params;
    };
    std::vector<Job> jobs;
    for (const auto& m : maps) jobs.push_back({m, std::nullopt});
    for (int i = 0; i < random; ++i) {
      RandomMapParams p;
      p.seed = seed + static_cast<std::uint64_t>(i);
      p.cell_size = c.map.strides.front();
      p.u_cap = c.map.u_cap;
      jobs.push_back({"random" + std::to_string(p.seed), p});
    }
    BenchOptions opt;
    opt.repeats = repeats;
    opt.c2f = c.global;
    std::vector<std::vector<BenchRow>> per_map(jobs.size());
    parallel_for(
        jobs.size(),
        [&](std::size_t i) {
          const MapPyramid pyr =
              jobs[i].params
                  ? build_pyramid_from_map(random_uncertainty_map(*jobs[i].params), c.map.strides, c.map.lambda)
                  : load_pyramid_dir(jobs[i].name);
          per_map[i] = run_global_bench(pyr, pr, opt, jobs[i].name);
        },
        parallel ? 0u : 1u);

    BenchReport rep;
    rep.config = header(c, {"bench repeats=" + std::to_string(repeats) + " parallel=" + (parallel ? "1" : "0")});
    if (random > 0) rep.config.push_back("random " + RandomMapParams{}.describe() + " (seed varies per map)");
    for (auto& rows : per_map)
      for (auto& r : rows) rep.rows.push_back(std::move(r));

    std::string prefix = out;
    for (const char* ext : {".json", ".csv", ".md"})
      if (prefix.size() > std::strlen(ext) && prefix.ends_with(ext)) prefix.resize(prefix.size() - std::strlen(ext));
    if (const auto parent = fs::path(prefix).parent_path(); !parent.empty()) fs::create_directories(parent);
    write_text(prefix + ".json", report_to_json(rep).dump(2) + "\n");
    write_text(prefix + ".csv", report_to_csv(rep));
    write_text(prefix + ".md", report_to_markdown(rep));

    const BenchSummary s = rep.summary();
    os << "bench: " << s.complete << "/" << s.rows << " complete rows, ordered " << s.ordered
       << ", mean U (T, I, C2F) = " << fmt_fixed(s.mean_uncertainty[0], 4) << " " << fmt_fixed(s.mean_uncertainty[1], 4)
       << " " << fmt_fixed(s.mean_uncertainty[2], 4) << ", mean time = " << fmt_fixed(s.mean_time_s[0], 6) << " "
       << fmt_fixed(s.mean_time_s[1], 6) << " " << fmt_fixed(s.mean_time_s[2], 6) << " s\n";
    return kExitOk;
  }
};

// ---- entry point --------------------------------------------------------

/// Parses and runs one invocation. Diagnostics are single lines of the form
/// "error: <code>: <message>" on `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Risk-aware off-road planning toolkit", "planner"};
  app.require_subcommand(1);
  MapCmd map;
  GlobalCmd global;
  SmoothCmd smooth;
  LocalCmd local;
  SimCmd sim;
  BenchCmd bench;
  RenderCmd render;
  map.add(app);
  global.add(app);
  smooth.add(app);
  local.add(app);
  sim.add(app);
  bench.add(app);
  render.add(app);

  if (argc > 1 && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    err << "error: usage: unknown subcommand '" << argv[1] << "' (see --help)\n";
    return kExitUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << " (see --help)\n";
    return kExitUsage;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "map") return map.run(out);
    if (name == "global") return global.run(out);
    if (name == "smooth") return smooth.run(out);
    if (name == "local") return local.run(out);
    if (name == "sim") return sim.run(out);
    if (name == "bench") return bench.run(out);
    return render.run(out);
  } catch (const UsageError& e) {
    err << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace riskplan::cli
