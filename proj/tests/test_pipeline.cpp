#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "riskplan/bench.hpp"
#include "riskplan/cli.hpp"
#include "riskplan/config.hpp"
#include "riskplan/sim.hpp"

using namespace riskplan;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "planner");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& rel) { return (oracle::data_dir() / rel).string(); }

CandidateTrajectory straight_trajectory(double v, int n, double dt) {
  CandidateTrajectory c;
  for (int i = 0; i < n; ++i) {
    TrajectoryPoint p;
    p.t = 2.0 + dt * i;
    p.x = v * dt * i;
    p.v = v;
    c.points.push_back(p);
  }
  c.duration = dt * (n - 1);
  return c;
}

Scenario open_road() {
  Scenario sc;
  sc.name = "open_road";
  sc.scene.width = 200;
  sc.scene.height = 40;
  sc.start = {5, 20};
  sc.goal = {120, 20};
  sc.reference = {{5, 20}, {120, 20}};
  sc.horizon = 60;
  return sc;
}

}  // namespace

// ---- sim ------------------------------------------------------------------

TEST(StepVehicle, InterpolatesAlongTheTrajectory) {
  const auto c = straight_trajectory(5.0, 21, 0.25);
  const auto v0 = step_vehicle(c, 0.0);
  EXPECT_EQ(v0.x, 0.0);
  EXPECT_EQ(v0.speed, 5.0);
  EXPECT_NEAR(step_vehicle(c, 1.0).x, 5.0, 1e-12);

  std::mt19937_64 rng(3);
  const auto pc = oracle::random_planning_case(rng);
  auto set = generate_candidates(pc.ref, pc.current, SamplingSpec::option1());
  const auto& cand = set.candidates.at(17);
  std::uniform_real_distribution<double> u(0.0, cand.duration);
  for (int k = 0; k < 50; ++k) {
    const double e = u(rng);
    const auto i = static_cast<std::size_t>(std::floor(e / 0.25));
    const auto& a = cand.points[std::min(i, cand.points.size() - 2)];
    const auto& b = cand.points[std::min(i, cand.points.size() - 2) + 1];
    const double f = (cand.points.front().t + e - a.t) / (b.t - a.t);
    const auto v = step_vehicle(cand, e);
    EXPECT_NEAR(v.x, a.x + (b.x - a.x) * f, 1e-9);
    EXPECT_NEAR(v.y, a.y + (b.y - a.y) * f, 1e-9);
  }
  EXPECT_THROW(step_vehicle(c, 6.0), Error);
  EXPECT_THROW(step_vehicle(CandidateTrajectory{}, 0.0), Error);
}

TEST(Scripts, PiecewiseConstantVelocity) {
  Scenario sc = open_road();
  ObstacleState o;
  o.position = {100, 20};
  o.velocity = {9, 9};  // overridden by the script
  ObstacleState free_mover;
  free_mover.position = {0, 0};
  free_mover.velocity = {1, 2};
  sc.scene.obstacles = {o, free_mover};
  sc.scripts.push_back({0, {{2.0, {1, 0}}, {5.0, {0, -1}}}});
  auto at = [&](double t) { return obstacles_at(sc, t); };
  EXPECT_EQ(at(0)[0].position, (Vec2{100, 20}));
  EXPECT_EQ(at(1)[0].position, (Vec2{101, 20}));
  EXPECT_EQ(at(1)[0].velocity, (Vec2{1, 0}));
  EXPECT_EQ(at(4)[0].position, (Vec2{102, 18}));
  EXPECT_EQ(at(10)[0].position, (Vec2{102, 17}));
  EXPECT_EQ(at(10)[0].velocity, (Vec2{0, 0}));
  EXPECT_EQ(at(3)[1].position, (Vec2{3, 6}));
}

TEST(Episode, ObstacleFreeStraightRun) {
  const Scenario sc = open_road();
  const PlannerConfig cfg;
  const auto log = run_episode(sc, scenario_reference(sc, cfg), cfg.local);
  EXPECT_TRUE(log.reached_goal()) << log.detail;
  EXPECT_EQ(log.max_field, 0.0);
  EXPECT_TRUE(audit_episode(log, cfg.local.constraints).empty());
}

TEST(Episode, BundledScenariosMatchGoldenLogs) {
  for (const std::string name : {"static_gauntlet", "moving_obstacle"}) {
    const auto sc = load_scenario(data("scenarios/" + name + ".json"));
    const PlannerConfig cfg;
    const auto ref = scenario_reference(sc, cfg);
    const auto log = run_episode(sc, ref, cfg.local);
    EXPECT_TRUE(log.reached_goal()) << name << ": " << log.detail;
    EXPECT_LT(log.max_field, cfg.local.constraints.e_thld);
    EXPECT_TRUE(audit_episode(log, cfg.local.constraints).empty()) << name;
    const auto text = episode_to_jsonl(log, cli::header(cfg, {"sim scenario=" + sc.name}));
    EXPECT_EQ(text, read_text(data("golden/" + name + ".jsonl"))) << name;
    EXPECT_EQ(text, episode_to_jsonl(run_episode(sc, ref, cfg.local), cli::header(cfg, {"sim scenario=" + sc.name})));
  }
}

TEST(Episode, IntegratedRunKeepsExposureNearTheReference) {
  const auto sc = load_scenario(data("scenarios/integrated.json"));
  PlannerConfig cfg;
  load_toml_config(cfg, data("integrated.toml"));
  const auto pipe = run_global_pipeline(sc.scene, sc.start, sc.goal, cfg);
  const auto log = run_episode(sc, pipe.reference, cfg.local);
  ASSERT_TRUE(log.reached_goal()) << log.detail;
  EXPECT_TRUE(audit_episode(log, cfg.local.constraints).empty());
  const auto& fine = pipe.pyramid.fine();
  GlobalPath executed, reference;
  for (const auto& p : log.executed) executed.nodes.push_back({p.x, p.y});
  reference.nodes = pipe.smoothed.nodes;
  EXPECT_LE(path_uncertainty(executed, fine), path_uncertainty(reference, fine) + 0.05);
}

TEST(Scenario, MalformedFieldReportsPath) {
  const json j = json::parse(R"({"scene": {"bounds": [10, 10], "static_sources": [{"center": [1, 1], "k_s": 1,
      "r_min": 3, "r_max": 2}]}, "start": [1, 1], "goal": [5, 5]})");
  try {
    parse_scenario(JsonField(j, "$"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("$.scene.static_sources[0]"), std::string::npos) << e.what();
  }
}

// ---- config ---------------------------------------------------------------

TEST(Config, TomlLayerAndUnitConversion) {
  PlannerConfig cfg;
  apply_toml(cfg, "[map]\nstrides = [1, 5, 20]\n[sampling]\nv_ref_kmh = 36\n[smoother]\ns_s = 4\n", "t.toml");
  EXPECT_EQ(cfg.map.strides, (std::vector<double>{1, 5, 20}));
  EXPECT_DOUBLE_EQ(cfg.local.sampling.v_ref, 10.0);
  EXPECT_EQ(cfg.smoother.s_s, 4.0);
  EXPECT_NO_THROW(validate_config(cfg));
}

TEST(Config, ErrorsNameTheKey) {
  PlannerConfig cfg;
  try {
    apply_toml(cfg, "[smoother]\nbogus = 1\n", "t.toml");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("smoother.bogus"), std::string::npos);
  }
  EXPECT_THROW(apply_toml(cfg, "[smoother\n", "t.toml"), Error);
  EXPECT_THROW(apply_assignment(cfg, "smoother.s_s"), Error);
  EXPECT_THROW(apply_assignment(cfg, "smoother.n_o=2.5"), Error);
}

TEST(Config, SpecJsonMatchesDefaults) {
  PlannerConfig from_json;
  apply_json_config(from_json, parse_json(read_text(data("spec.json")), "spec.json"), "spec.json");
  EXPECT_EQ(config_lines(from_json), config_lines(PlannerConfig{}));
}

TEST(Config, PrecedenceDefaultsFileSetFlag) {
  const auto dir = oracle::scratch_dir("config");
  write_text(dir / "c.toml", "[smoother]\ns_s = 4\nn_o = 30\n[map]\nlambda = 0.25\n");
  cli::ConfigOptions opt;
  opt.config_file = (dir / "c.toml").string();
  opt.sets = {"smoother.s_s=6", "smoother.n_b=7"};
  opt.flags = {{"smoother.s_s", 8.0}};
  const auto cfg = opt.resolve();
  EXPECT_EQ(cfg.smoother.s_s, 8.0);
  EXPECT_EQ(cfg.smoother.n_o, 30u);
  EXPECT_EQ(cfg.smoother.n_b, 7u);
  EXPECT_EQ(cfg.map.lambda, 0.25);
  EXPECT_EQ(cfg.local.sampling.dt, 0.25);
}

// ---- cli ------------------------------------------------------------------

TEST(Cli, HelpAndUsageErrors) {
  auto r = run_cli({"global", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--goal"), std::string::npos);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  r = run_cli({"smooth", "--in", "x.csv", "--out", "y.csv", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error: usage:", 0), 0u) << r.err;
  EXPECT_EQ(run_cli({"global", "--scene", data("designed_scene.json"), "--start", "1", "--goal", "2,2", "--out",
                     "x.csv"})
                .code,
            2);
  EXPECT_EQ(run_cli({"smooth", "--in", "x.csv", "--out", "y.csv", "--set", "smoother.s_s=-1"}).code, 2);
}

TEST(Cli, DomainErrorsExitOne) {
  const auto dir = oracle::scratch_dir("cli_errors");
  write_text(dir / "bad.json", R"({"name": "bad", "scene": {"bounds": [10, "x"]}, "start": [1, 1], "goal": [2, 2]})");
  auto r = run_cli({"sim", "--scenario", (dir / "bad.json").string(), "--out", (dir / "o.jsonl").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error: parse: ", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("$.scene.bounds"), std::string::npos) << r.err;

  r = run_cli({"global", "--scene", data("designed_scene.json"), "--config", data("integrated.toml"), "--start",
               "20,20", "--goal", "5000,20", "--out", (dir / "p.csv").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("out_of_bounds"), std::string::npos) << r.err;

  r = run_cli({"smooth", "--in", (dir / "missing.csv").string(), "--out", (dir / "s.csv").string()});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, MapGlobalSmoothSimChain) {
  const auto dir = oracle::scratch_dir("cli_chain");
  const std::string cfg = data("integrated.toml");
  auto r = run_cli({"map", "--scene", data("designed_scene.json"), "--config", cfg, "--out", (dir / "map").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "map" / "pyramid.json"));
  EXPECT_TRUE(fs::exists(dir / "map" / "field.pgm"));

  r = run_cli({"global", "--map", (dir / "map").string(), "--config", cfg, "--start", "20,20", "--goal", "280,280",
               "--out", (dir / "raw.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "raw.csv.stats.json"));
  const auto raw = path_from_csv(read_text(dir / "raw.csv"), "raw.csv");
  EXPECT_EQ(raw.front(), (Vec2{20, 20}));
  EXPECT_EQ(raw.back(), (Vec2{280, 280}));

  r = run_cli({"smooth", "--in", (dir / "raw.csv").string(), "--config", cfg, "--out", (dir / "smooth.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;

  r = run_cli({"sim", "--scenario", data("scenarios/integrated.json"), "--config", cfg, "--ref",
               (dir / "smooth.csv").string(), "--out", (dir / "episode.jsonl").string(), "--render",
               (dir / "frames").string(), "--frame-every", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("goal_reached"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("audit_issues=0"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir / "frames" / "overview.svg"));

  // The file chain reproduces the in-process pipeline.
  const auto sc = load_scenario(data("scenarios/integrated.json"));
  PlannerConfig pc;
  load_toml_config(pc, cfg);
  const auto log = run_episode(sc, run_global_pipeline(sc.scene, sc.start, sc.goal, pc).reference, pc.local);
  const std::string text = read_text(dir / "episode.jsonl");
  const auto tail = text.substr(text.find('\n') + 1);
  EXPECT_EQ(tail, episode_to_jsonl(log));
}

TEST(Cli, LocalWritesTrajectoryFiles) {
  const auto dir = oracle::scratch_dir("cli_local");
  write_text(dir / "ref.csv", path_to_csv(std::vector<Vec2>{{0, 0}, {200, 0}}));
  const auto r = run_cli({"local", "--ref", (dir / "ref.csv").string(), "--spec", data("spec.json"), "--out",
                          (dir / "traj").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string best = read_text(dir / "traj" / "best.csv");
  EXPECT_NE(best.find("t,x,y,s,d,v,ay,ax,c,e"), std::string::npos);
  EXPECT_NE(best.find("# cost J_s="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "traj" / "summary.json"));
}

TEST(Cli, BenchWritesAllFormats) {
  const auto dir = oracle::scratch_dir("cli_bench");
  write_text(dir / "pairs.csv", "start_x,start_y,goal_x,goal_y\n15,25,385,375\n390,10,20,380\n");
  const auto r = run_cli({"bench", "--random", "1", "--seed", "3", "--set", "map.strides=[10,40,80]", "--pairs",
                          (dir / "pairs.csv").string(), "--repeats", "1", "--out", (dir / "report.json").string()});
  // Random maps are 200 x 200 cells unless configured; these pairs fit.
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* ext : {".json", ".csv", ".md"}) EXPECT_TRUE(fs::exists(dir / (std::string("report") + ext)));
  const json rep = json::parse(read_text(dir / "report.json"));
  EXPECT_EQ(rep["rows"].size(), 2u);
}

// ---- bench ----------------------------------------------------------------

TEST(Bench, ReportArithmetic) {
  RandomMapParams p;
  p.width = p.height = 60;
  p.seed = 8;
  const auto pyr = build_pyramid_from_map(random_uncertainty_map(p), {10, 40, 80}, 0.5);
  const std::vector<PairSpec> pairs{{{15, 25}, {585, 575}}, {{590, 10}, {20, 580}}, {{300, 20}, {310, 590}}};
  BenchReport rep;
  rep.rows = run_global_bench(pyr, pairs, BenchOptions{}, "m");
  const auto again = run_global_bench(pyr, pairs, BenchOptions{}, "m");
  for (std::size_t i = 0; i < pairs.size(); ++i)
    for (std::size_t k = 0; k < 3; ++k)
      EXPECT_EQ(rep.rows[i].runs[k].stats.mean_uncertainty, again[i].runs[k].stats.mean_uncertainty);

  const auto s = rep.summary();
  ASSERT_EQ(s.complete, 3u);
  double mean_i = 0, mean_c = 0, mean_impr = 0;
  for (const auto& r : rep.rows) {
    mean_i += r.runs[1].stats.mean_uncertainty / 3;
    mean_c += r.runs[2].stats.mean_uncertainty / 3;
    mean_impr += r.improvement() / 3;
  }
  EXPECT_NEAR(s.mean_uncertainty[1], mean_i, 1e-12);
  EXPECT_NEAR(s.improvement_row_mean, mean_impr, 1e-12);
  EXPECT_NEAR(s.improvement_of_means, (mean_i - mean_c) / mean_i, 1e-12);

  BenchRow same = rep.rows[0];
  same.runs[2] = same.runs[1];
  EXPECT_EQ(same.improvement(), 0.0);

  const std::string md = report_to_markdown(rep);
  EXPECT_NE(md.find("| Average |"), std::string::npos);
  EXPECT_NE(md.find("(row mean)"), std::string::npos);
  EXPECT_EQ(report_to_json(rep)["summary"]["complete"], 3);
  EXPECT_NE(report_to_csv(rep).find("u_tastar,u_iastar,u_c2f"), std::string::npos);
}

TEST(Bench, FailedPairIsFlaggedAndExcluded) {
  RandomMapParams p;
  p.width = p.height = 40;
  const auto pyr = build_pyramid_from_map(random_uncertainty_map(p), {10, 40, 80}, 0.5);
  BenchReport rep;
  rep.rows = run_global_bench(pyr, {{{15, 15}, {385, 385}}, {{15, 15}, {900, 900}}}, BenchOptions{});
  EXPECT_TRUE(rep.rows[0].all_ok());
  EXPECT_FALSE(rep.rows[1].all_ok());
  EXPECT_EQ(rep.summary().complete, 1u);
  EXPECT_NE(report_to_markdown(rep).find("excluded"), std::string::npos);
}

TEST(Bench, PairsCsvRoundtrip) {
  const auto pairs = default_pairs();
  ASSERT_EQ(pairs.size(), 10u);
  const auto back = pairs_from_csv(pairs_to_csv(pairs), "p.csv");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(back[i].start, pairs[i].start);
    EXPECT_EQ(back[i].goal, pairs[i].goal);
  }
  const auto file = pairs_from_csv(read_text(data("pairs.csv")), "pairs.csv");
  EXPECT_EQ(file.size(), 10u);
  EXPECT_THROW(pairs_from_csv("a,b\n1,2\n", "p.csv"), Error);
}
