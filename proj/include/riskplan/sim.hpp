#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "riskplan/frenet.hpp"
#include "riskplan/io.hpp"
#include "riskplan/local_planner.hpp"
#include "riskplan/pipeline.hpp"
#include "riskplan/riskfield.hpp"

namespace riskplan {

struct VehicleState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
};

/// Perfect tracking: the pose on `traj` at `elapsed` seconds after its
/// start, linearly interpolated between discretized points.
inline VehicleState step_vehicle(const CandidateTrajectory& traj, double elapsed) {
  const auto& pts = traj.points;
  if (pts.empty()) throw Error(ErrorCode::kInvalidArgument, "step_vehicle: empty trajectory");
  const double span = pts.back().t - pts.front().t;
  if (elapsed < -1e-12 || elapsed > span + 1e-9)
    throw Error(ErrorCode::kInvalidArgument,
                "step_vehicle: elapsed " + fmt_double(elapsed) + " s beyond trajectory duration " + fmt_double(span));
  const double t = pts.front().t + std::clamp(elapsed, 0.0, span);
  std::size_t k = 0;
  while (k + 2 < pts.size() && pts[k + 1].t <= t) ++k;
  if (pts.size() == 1) return {pts[0].x, pts[0].y, pts[0].theta, pts[0].v};
  const auto& a = pts[k];
  const auto& b = pts[k + 1];
  const double f = b.t > a.t ? std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0) : 0.0;
  VehicleState v;
  v.x = a.x + (b.x - a.x) * f;
  v.y = a.y + (b.y - a.y) * f;
  const double dx = b.x - a.x, dy = b.y - a.y;
  v.heading = std::hypot(dx, dy) > 1e-12 ? std::atan2(dy, dx) : a.theta;
  v.speed = a.v + (b.v - a.v) * f;
  return v;
}

/// Velocity held from the end of the previous segment until `until`.
struct MotionSegment {
  double until = 0.0;
  Vec2 velocity;
};

/// Overrides the scene velocity of one obstacle. After the last segment the
/// obstacle stands still.
struct ObstacleScript {
  std::size_t obstacle = 0;
  std::vector<MotionSegment> segments;
};

struct Scenario {
  std::string name;
  RiskScene scene;
  Vec2 start;
  Vec2 goal;
  std::vector<Vec2> reference;  // empty: plan one with the global pipeline
  std::vector<ObstacleScript> scripts;
  double step = 0.25;
  double horizon = 120.0;
  double goal_tolerance = 2.0;
  std::optional<double> initial_speed;  // default: target speed

  void validate() const {
    scene.validate();
    if (!(step > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scenario: step must be > 0");
    if (!(horizon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scenario: horizon must be > 0");
    if (!(goal_tolerance > 0.0)) throw Error(ErrorCode::kInvalidArgument, "scenario: goal_tolerance must be > 0");
    if (initial_speed && !(*initial_speed >= 0.0))
      throw Error(ErrorCode::kInvalidArgument, "scenario: initial_speed must be >= 0");
    for (const auto& s : scripts) {
      if (s.obstacle >= scene.obstacles.size())
        throw Error(ErrorCode::kInvalidArgument, "scenario: script refers to missing obstacle " +
                                                     std::to_string(s.obstacle));
      double prev = 0.0;
      for (const auto& seg : s.segments) {
        if (!(seg.until > prev))
          throw Error(ErrorCode::kInvalidArgument, "scenario: script segment ends must increase from 0");
        prev = seg.until;
      }
    }
  }
};

/// Obstacle states at time t with velocities integrated from the scripts.
inline std::vector<ObstacleState> obstacles_at(const Scenario& sc, double t) {
  std::vector<ObstacleState> out = sc.scene.obstacles;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const ObstacleScript* script = nullptr;
    for (const auto& s : sc.scripts)
      if (s.obstacle == i) script = &s;
    if (!script) {
      out[i].position = out[i].position + out[i].velocity * t;
      continue;
    }
    Vec2 p = out[i].position;
    Vec2 v{};
    double begin = 0.0;
    for (const auto& seg : script->segments) {
      if (t <= begin) break;
      const double end = std::min(t, seg.until);
      p = p + seg.velocity * (end - begin);
      if (t < seg.until) v = seg.velocity;
      begin = seg.until;
    }
    out[i].position = p;
    out[i].velocity = v;
  }
  return out;
}

inline Scenario parse_scenario(const JsonField& root) {
  Scenario sc;
  if (root.has("name")) sc.name = root["name"].string();
  sc.scene = parse_scene(root["scene"]);
  sc.start = root["start"].vec2();
  sc.goal = root["goal"].vec2();
  if (root.has("reference")) {
    const JsonField r = root["reference"];
    for (std::size_t i = 0; i < r.array_size(); ++i) sc.reference.push_back(r[i].vec2());
    if (sc.reference.size() < 2) r.fail("need at least 2 points");
  }
  if (root.has("scripts")) {
    const JsonField arr = root["scripts"];
    for (std::size_t i = 0; i < arr.array_size(); ++i) {
      ObstacleScript s;
      s.obstacle = static_cast<std::size_t>(arr[i]["obstacle"].integer());
      const JsonField segs = arr[i]["segments"];
      for (std::size_t k = 0; k < segs.array_size(); ++k)
        s.segments.push_back({segs[k]["until"].number(), segs[k]["velocity"].vec2()});
      sc.scripts.push_back(std::move(s));
    }
  }
  sc.step = root.number_or("step", sc.step);
  sc.horizon = root.number_or("horizon", sc.horizon);
  sc.goal_tolerance = root.number_or("goal_tolerance", sc.goal_tolerance);
  if (root.has("initial_speed")) sc.initial_speed = root["initial_speed"].number();
  validate_at(sc, root);
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  const json j = parse_json(read_text(path), path.string());
  return parse_scenario(JsonField(j, "$"));
}

enum class Termination { kGoalReached, kHorizon, kNoFeasibleTrajectory };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::kGoalReached: return "goal_reached";
    case Termination::kHorizon: return "horizon";
    case Termination::kNoFeasibleTrajectory: return "no_feasible_trajectory";
  }
  return "unknown";
}

/// A pose the vehicle actually passed through, with the kinematics of the
/// winning trajectory and the field from obstacles at that instant.
struct ExecutedPose {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double v = 0.0;
  double a_y = 0.0;
  double a_x = 0.0;
  double c = 0.0;
  double e_planned = 0.0;
  double e = 0.0;
};

struct TickRecord {
  std::size_t tick = 0;
  double t = 0.0;
  VehicleState vehicle;
  FrenetState state;
  std::vector<Vec2> obstacles;
  std::size_t candidates = 0;
  std::size_t feasible = 0;
  std::size_t dropped = 0;
  std::array<std::size_t, kConstraintCount> rejections{};
  std::optional<CandidateTrajectory> winner;
};

struct EpisodeLog {
  std::string scenario;
  std::vector<TickRecord> ticks;
  std::vector<ExecutedPose> executed;
  Termination termination = Termination::kHorizon;
  std::string detail;
  double end_time = 0.0;
  double max_field = 0.0;  // over executed poses
  double planning_wall_s = 0.0;
  std::size_t plan_calls = 0;

  bool reached_goal() const { return termination == Termination::kGoalReached; }
};

inline double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  const double f = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return distance(p, a + ab * f);
}

/// Receding-horizon loop: move obstacles, plan, advance one replan interval
/// along the winner. Stops at the goal, at the horizon, or when no
/// trajectory is feasible. `candidates_out`, when given, receives every
/// tick's candidate set (for rendering).
inline EpisodeLog run_episode(const Scenario& sc, const ReferencePath& ref, const LocalPlannerConfig& cfg,
                              std::vector<std::vector<CandidateTrajectory>>* candidates_out = nullptr) {
  sc.validate();
  EpisodeLog log;
  log.scenario = sc.name;
  // Field weights belong to the scene.
  LocalPlannerConfig local = cfg;
  local.field_weights = sc.scene.field_weights;
  LocalPlanner planner(ref, local);

  const FrenetPoint fp = world_to_frenet(ref, sc.start);
  FrenetState state;
  state.s = fp.s;
  state.d = fp.d;
  state.s_d = sc.initial_speed.value_or(cfg.sampling.v_ref);
  VehicleState vehicle{sc.start.x, sc.start.y, wrap_angle(reference_pose(ref, fp.s).theta), state.s_d};

  if (distance(sc.start, sc.goal) <= sc.goal_tolerance) {
    log.termination = Termination::kGoalReached;
    return log;
  }
  const std::size_t max_ticks = static_cast<std::size_t>(std::ceil(sc.horizon / sc.step - 1e-9));
  for (std::size_t tick = 0; tick < max_ticks; ++tick) {
    const double t = static_cast<double>(tick) * sc.step;
    state.t = t;
    TickRecord rec;
    rec.tick = tick;
    rec.t = t;
    rec.vehicle = vehicle;
    rec.state = state;
    const auto obstacles = obstacles_at(sc, t);
    for (const auto& o : obstacles) rec.obstacles.push_back(o.position);

    PlanStepResult step;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      step = planner.plan_step(state, obstacles);
    } catch (const NoFeasibleTrajectory& e) {
      log.planning_wall_s += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      ++log.plan_calls;
      rec.rejections = e.rejections();
      rec.dropped = e.dropped();
      for (auto n : e.rejections()) rec.candidates += n;
      log.ticks.push_back(std::move(rec));
      log.termination = Termination::kNoFeasibleTrajectory;
      log.detail = e.what();
      log.end_time = t;
      return log;
    }
    log.planning_wall_s += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ++log.plan_calls;
    rec.candidates = step.candidates.size();
    rec.dropped = step.dropped;
    rec.rejections = step.rejections;
    for (const auto& c : step.candidates) rec.feasible += c.feasible ? 1 : 0;
    const CandidateTrajectory& win = step.best;

    std::vector<Vec2> swept;
    for (const auto& p : win.points) {
      if (p.t - t > sc.step + 1e-9) break;
      ExecutedPose ep{p.t, p.x, p.y, p.v, p.a_y, p.a_x, p.c, p.e, 0.0};
      ep.e = total_obstacle_field(obstacles_at(sc, p.t), local.field_weights, {p.x, p.y});
      log.max_field = std::max(log.max_field, ep.e);
      log.executed.push_back(ep);
      swept.push_back({p.x, p.y});
    }
    const double adv = std::min(sc.step, win.duration);
    vehicle = step_vehicle(win, adv);
    const Vec2 end_pos{vehicle.x, vehicle.y};
    if (swept.empty() || !(swept.back() == end_pos)) swept.push_back(end_pos);

    state.s = win.longitudinal.value(adv);
    state.s_d = win.longitudinal.d1(adv);
    state.s_dd = win.longitudinal.d2(adv);
    state.d = win.lateral.value(adv);
    state.d_d = win.lateral.d1(adv);
    state.d_dd = win.lateral.d2(adv);

    rec.winner = win;
    log.ticks.push_back(std::move(rec));
    if (candidates_out) candidates_out->push_back(std::move(step.candidates));

    for (std::size_t i = 0; i + 1 < swept.size(); ++i) {
      if (segment_distance(sc.goal, swept[i], swept[i + 1]) <= sc.goal_tolerance) {
        log.termination = Termination::kGoalReached;
        log.end_time = t + adv;
        return log;
      }
    }
  }
  log.termination = Termination::kHorizon;
  log.end_time = static_cast<double>(max_ticks) * sc.step;
  return log;
}

/// Reference for a scenario: its explicit polyline, extended past the goal,
/// or the global pipeline's smoothed path.
inline ReferencePath scenario_reference(const Scenario& sc, const PlannerConfig& cfg) {
  if (!sc.reference.empty())
    return build_reference(extend_path(sc.reference, lookahead_length(cfg.local)), cfg.reference_ds);
  return run_global_pipeline(sc.scene, sc.start, sc.goal, cfg).reference;
}

// ---- log audit ----------------------------------------------------------

/// Post-hoc check of every executed pose against the field threshold and
/// the kinematic bounds. Returns the problems found.
inline std::vector<std::string> audit_episode(const EpisodeLog& log, const ConstraintSpec& c) {
  std::vector<std::string> issues;
  for (const auto& p : log.executed) {
    const std::string at = "t=" + fmt_double(p.t) + ": ";
    if (!(p.e < c.e_thld)) issues.push_back(at + "field " + fmt_double(p.e) + " >= e_thld");
    if (p.v < c.v_min || p.v > c.v_max) issues.push_back(at + "speed " + fmt_double(p.v) + " out of bounds");
    if (p.a_y < c.ay_min || p.a_y > c.ay_max) issues.push_back(at + "a_y " + fmt_double(p.a_y) + " out of bounds");
    if (p.a_x < c.ax_min || p.a_x > c.ax_max) issues.push_back(at + "a_x " + fmt_double(p.a_x) + " out of bounds");
    if (p.c < c.c_min || p.c > c.c_max) issues.push_back(at + "curvature " + fmt_double(p.c) + " out of bounds");
  }
  return issues;
}

// ---- JSON-lines ---------------------------------------------------------

inline json frenet_to_json(const FrenetState& s) {
  return {{"t", s.t}, {"s", s.s}, {"s_d", s.s_d}, {"s_dd", s.s_dd}, {"d", s.d}, {"d_d", s.d_d}, {"d_dd", s.d_dd}};
}

inline json tick_to_json(const TickRecord& r) {
  json j;
  j["tick"] = r.tick;
  j["t"] = r.t;
  j["vehicle"] = {{"x", r.vehicle.x}, {"y", r.vehicle.y}, {"heading", r.vehicle.heading}, {"speed", r.vehicle.speed}};
  j["state"] = frenet_to_json(r.state);
  j["obstacles"] = json::array();
  for (const auto& o : r.obstacles) j["obstacles"].push_back({o.x, o.y});
  j["candidates"] = r.candidates;
  j["feasible"] = r.feasible;
  j["dropped"] = r.dropped;
  json rej;
  for (std::size_t k = 0; k < kConstraintCount; ++k) rej[to_string(static_cast<Constraint>(k))] = r.rejections[k];
  j["rejections"] = rej;
  if (r.winner) {
    const auto& w = *r.winner;
    j["winner"] = {{"id", w.id},
                   {"duration", w.duration},
                   {"terminal", frenet_to_json(w.terminal)},
                   {"cost", {{"J_s", w.cost.j_s}, {"J_t", w.cost.j_t}, {"J_e", w.cost.j_e}, {"J_c", w.cost.j_c}, {"J", w.cost.total}}},
                   {"max_e", w.max_field()}};
  } else {
    j["winner"] = nullptr;
  }
  return j;
}

/// One record per replan tick, then a summary record. Wall-clock timings
/// are left out so that logs are reproducible byte for byte.
inline std::string episode_to_jsonl(const EpisodeLog& log, const std::vector<std::string>& config = {}) {
  std::string out;
  if (!config.empty()) out += json{{"config", config}}.dump() + "\n";
  for (const auto& r : log.ticks) out += tick_to_json(r).dump() + "\n";
  json exec = json::array();
  for (const auto& p : log.executed)
    exec.push_back({p.t, p.x, p.y, p.v, p.a_y, p.a_x, p.c, p.e_planned, p.e});
  json summary = {{"summary",
                   {{"scenario", log.scenario},
                    {"termination", to_string(log.termination)},
                    {"detail", log.detail},
                    {"end_time", log.end_time},
                    {"ticks", log.ticks.size()},
                    {"max_e", log.max_field},
                    {"executed_columns", {"t", "x", "y", "v", "ay", "ax", "c", "e_planned", "e"}},
                    {"executed", exec}}}};
  out += summary.dump() + "\n";
  return out;
}

}  // namespace riskplan
