#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskplan/common.hpp"
#include "riskplan/frenet.hpp"
#include "riskplan/parallel.hpp"
#include "riskplan/riskfield.hpp"

namespace riskplan {

inline constexpr double kmh_to_ms(double kmh) { return kmh / 3.6; }

/// Terminal-state lattice. t and d bounds are absolute; s bounds are
/// fractions of the reference advance s_r = v_c * t_ref.
struct SamplingSpec {
  double t_min = 3.0;
  double t_max = 7.0;
  double t_ref = 5.0;
  int t_lower = 2;
  int t_upper = 2;

  double d_min = -7.0;
  double d_max = 7.0;
  int d_lower = 4;
  int d_upper = 4;

  double s_min_ratio = 0.8;
  double s_max_ratio = 1.2;
  int s_lower = 3;
  int s_upper = 3;

  double v_ref = kmh_to_ms(25.0);
  double dt = 0.25;
  // Floor on the speed used for s_r; keeps the s lattice non-degenerate
  // when starting from rest.
  double min_reference_speed = 1.0;
  // s_r from the mean of current and target speed (the distance covered
  // while ramping to v_ref) instead of the current speed alone. The two
  // agree at cruise; the current-speed rule lets a slowed vehicle keep
  // shrinking its own lattice.
  bool advance_at_mean_speed = true;

  static SamplingSpec option1() { return {}; }
  static SamplingSpec option2() {
    SamplingSpec s;
    s.t_lower = 3;
    s.t_upper = 3;
    s.d_lower = 7;
    s.d_upper = 7;
    s.s_lower = 4;
    s.s_upper = 4;
    return s;
  }

  void validate() const {
    if (!(t_min < t_max && t_min <= t_ref && t_ref <= t_max && t_min > 0.0))
      throw Error(ErrorCode::kInvalidArgument, "sampling: need 0 < t_min <= t_ref <= t_max, t_min < t_max");
    if (!(d_min < d_max && d_min <= 0.0 && 0.0 <= d_max))
      throw Error(ErrorCode::kInvalidArgument, "sampling: need d_min <= 0 <= d_max, d_min < d_max");
    if (!(s_min_ratio < s_max_ratio && s_min_ratio <= 1.0 && 1.0 <= s_max_ratio))
      throw Error(ErrorCode::kInvalidArgument, "sampling: need s_min_ratio <= 1 <= s_max_ratio");
    if (t_lower < 0 || t_upper < 0 || d_lower < 0 || d_upper < 0 || s_lower < 0 || s_upper < 0)
      throw Error(ErrorCode::kInvalidArgument, "sampling: sample counts must be >= 0");
    if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "sampling: dt must be > 0");
    if (!(v_ref >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "sampling: v_ref must be >= 0");
  }
};

struct ConstraintSpec {
  double v_min = 0.0;
  double v_max = kmh_to_ms(50.0);
  double ay_min = -7.0;
  double ay_max = 3.5;
  double ax_min = -4.0;
  double ax_max = 4.0;
  double c_min = -0.43;
  double c_max = 0.43;
  double e_thld = 10.0;

  void validate() const {
    if (!(v_min < v_max && ay_min < ay_max && ax_min < ax_max && c_min < c_max))
      throw Error(ErrorCode::kInvalidArgument, "constraints: every min must be below its max");
    if (!(e_thld > 0.0)) throw Error(ErrorCode::kInvalidArgument, "constraints: e_thld must be > 0");
  }
};

/// Diagonal weights over (t, d, d', d'', s, s', s'').
using StateWeights = std::array<double, 7>;

struct CostWeights {
  double w_a = 1.0;
  double w_s = 2.0;
  double w_d = 5.0;
  StateWeights w_t = {5.0, 20.0, 0.0, 0.0, 18.0, 0.0, 0.0};
  double w_e = 100.0;
  StateWeights w_c = {0.0, 1.5, 0.0, 0.0, 0.2, 0.0, 0.0};

  void validate() const {
    bool ok = w_a >= 0.0 && w_s >= 0.0 && w_d >= 0.0 && w_e >= 0.0;
    for (double v : w_t) ok = ok && v >= 0.0;
    for (double v : w_c) ok = ok && v >= 0.0;
    if (!ok) throw Error(ErrorCode::kInvalidArgument, "cost weights must be >= 0");
  }
};

enum class Constraint { kSpeed = 0, kLongitudinalAccel, kLateralAccel, kCurvature, kSafety };
inline constexpr std::size_t kConstraintCount = 5;

inline const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::kSpeed: return "speed";
    case Constraint::kLongitudinalAccel: return "longitudinal_accel";
    case Constraint::kLateralAccel: return "lateral_accel";
    case Constraint::kCurvature: return "curvature";
    case Constraint::kSafety: return "safety";
  }
  return "unknown";
}

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double s = 0.0;
  double s_d = 0.0;
  double s_dd = 0.0;
  double s_ddd = 0.0;
  double d = 0.0;
  double d_d = 0.0;
  double d_dd = 0.0;
  double d_ddd = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double a_y = 0.0;  // longitudinal acceleration
  double a_x = 0.0;  // lateral acceleration
  double c = 0.0;
  double e = 0.0;
};

struct CostBreakdown {
  double j_s = 0.0;
  double j_t = 0.0;
  double j_e = 0.0;
  double j_c = 0.0;
  double total = 0.0;
};

struct CandidateTrajectory {
  std::size_t id = 0;  // generation order
  QuinticPoly lateral;
  QuinticPoly longitudinal;
  double duration = 0.0;
  double start_time = 0.0;
  std::vector<TrajectoryPoint> points;
  FrenetState terminal;  // absolute time and arclength
  bool feasible = false;
  std::optional<Constraint> violation;
  std::size_t violation_point = 0;
  CostBreakdown cost;

  double max_field() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.e);
    return m;
  }
};

/// Lattice on one axis: N_l values in [lo, r), the target r, N_u values in
/// (r, hi], ascending.
inline std::vector<double> sample_axis(double lo, double r, double hi, int n_lower, int n_upper) {
  if (lo > hi) throw Error(ErrorCode::kInvalidArgument, "sample_axis: lo exceeds hi");
  if (r < lo || r > hi) throw Error(ErrorCode::kInvalidArgument, "sample_axis: target outside [lo, hi]");
  if (n_lower < 0 || n_upper < 0) throw Error(ErrorCode::kInvalidArgument, "sample_axis: negative count");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_lower + n_upper + 1));
  for (int i = n_lower; i >= 1; --i) {
    out.push_back(r * (n_lower - i) / n_lower + lo * static_cast<double>(i) / n_lower);
  }
  out.push_back(r);
  for (int i = 1; i <= n_upper; ++i) {
    out.push_back(r * (n_upper - i) / n_upper + hi * static_cast<double>(i) / n_upper);
  }
  return out;
}

/// Nominal target: on the reference, at target speed, no lateral motion.
inline FrenetState reference_target(const FrenetState& current, const SamplingSpec& spec) {
  const double v_now = std::abs(current.s_d);
  const double v_c = std::max(spec.advance_at_mean_speed ? 0.5 * (v_now + spec.v_ref) : v_now, spec.min_reference_speed);
  FrenetState r;
  r.t = current.t + spec.t_ref;
  r.s = current.s + v_c * spec.t_ref;
  r.s_d = spec.v_ref;
  return r;
}

struct CandidateSet {
  std::vector<CandidateTrajectory> candidates;
  std::size_t dropped = 0;  // terminal or intermediate s outside the reference
  FrenetState target;
};

/// Cartesian product over sampled (t, d, s) terminals, each joined to the
/// current state by lateral and longitudinal quintics and discretized at dt.
inline CandidateSet generate_candidates(const ReferencePath& ref, const FrenetState& current,
                                        const SamplingSpec& spec) {
  spec.validate();
  if (current.s < -kDomainTolerance || current.s > ref.length() + kDomainTolerance)
    throw Error(ErrorCode::kOutOfDomain, "generate_candidates: current state outside reference domain");
  CandidateSet set;
  set.target = reference_target(current, spec);
  const double s_adv = set.target.s - current.s;
  const auto ts = sample_axis(spec.t_min, spec.t_ref, spec.t_max, spec.t_lower, spec.t_upper);
  const auto ds = sample_axis(spec.d_min, 0.0, spec.d_max, spec.d_lower, spec.d_upper);
  const auto ss = sample_axis(spec.s_min_ratio * s_adv, s_adv, spec.s_max_ratio * s_adv, spec.s_lower, spec.s_upper);
  std::size_t id = 0;
  for (double T : ts) {
    const auto n_pts = static_cast<std::size_t>(std::floor(T / spec.dt + 1e-9)) + 1;
    for (double d_t : ds) {
      const QuinticPoly lat = fit_quintic(current.d, current.d_d, current.d_dd, d_t, 0.0, 0.0, T);
      for (double s_rel : ss) {
        CandidateTrajectory c;
        c.id = id++;
        c.lateral = lat;
        c.longitudinal = fit_quintic(current.s, current.s_d, current.s_dd, current.s + s_rel, spec.v_ref, 0.0, T);
        c.duration = T;
        c.start_time = current.t;
        c.terminal = {current.t + T, current.s + s_rel, spec.v_ref, 0.0, d_t, 0.0, 0.0};
        c.points.resize(n_pts);
        bool in_domain = true;
        for (std::size_t k = 0; k < n_pts && in_domain; ++k) {
          const double t = static_cast<double>(k) * spec.dt;
          TrajectoryPoint& p = c.points[k];
          p.t = current.t + t;
          p.s = c.longitudinal.value(t);
          p.s_d = c.longitudinal.d1(t);
          p.s_dd = c.longitudinal.d2(t);
          p.s_ddd = c.longitudinal.d3(t);
          p.d = lat.value(t);
          p.d_d = lat.d1(t);
          p.d_dd = lat.d2(t);
          p.d_ddd = lat.d3(t);
          if (p.s < -kDomainTolerance || p.s > ref.length() + kDomainTolerance) {
            in_domain = false;
            break;
          }
          const Vec2 w = frenet_to_world(ref, p.s, p.d);
          p.x = w.x;
          p.y = w.y;
        }
        if (!in_domain) {
          ++set.dropped;
          continue;
        }
        set.candidates.push_back(std::move(c));
      }
    }
  }
  return set;
}

/// Heading, curvature, speed and accelerations at every point from the
/// world-frame polyline and the Frenet derivatives.
inline void annotate_kinematics(CandidateTrajectory& traj, const ReferencePath& ref, double dt,
                                bool approximate_ay = false) {
  auto& pts = traj.points;
  const std::size_t n = pts.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "annotate_kinematics: trajectory has no points");
  constexpr double kMinStep = 1e-9;
  std::vector<double> seg_len(n > 1 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 step{pts[i + 1].x - pts[i].x, pts[i + 1].y - pts[i].y};
    seg_len[i] = step.norm();
    if (seg_len[i] > kMinStep) {
      pts[i].theta = std::atan2(step.y, step.x);
    } else if (i > 0) {
      pts[i].theta = pts[i - 1].theta;
    } else {
      pts[i].theta = reference_pose(ref, pts[i].s).theta;
    }
  }
  if (n == 1) pts[0].theta = reference_pose(ref, pts[0].s).theta;
  else pts[n - 1].theta = pts[n - 2].theta;

  for (std::size_t i = 0; i < n; ++i) pts[i].c = 0.0;
  if (n >= 3) {
    for (std::size_t i = 0; i + 2 < n; ++i) {
      if (seg_len[i] > kMinStep) {
        pts[i].c = wrap_angle(pts[i + 1].theta - pts[i].theta) / seg_len[i];
      } else {
        pts[i].c = i > 0 ? pts[i - 1].c : 0.0;
      }
    }
    pts[n - 2].c = pts[n - 3].c;
    pts[n - 1].c = pts[n - 2].c;
  }
  for (auto& p : pts) {
    const double k = 1.0 - p.c * p.d;
    p.v = std::sqrt(p.s_d * p.s_d * k * k + p.d_d * p.d_d);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (approximate_ay) {
      pts[i].a_y = pts[i].s_dd;
    } else if (i + 1 < n) {
      pts[i].a_y = (pts[i + 1].v - pts[i].v) / dt;
    } else {
      pts[i].a_y = n >= 2 ? pts[i - 1].a_y : 0.0;
    }
    pts[i].a_x = pts[i].v * pts[i].v * pts[i].c;
  }
}

/// Point-wise check in the order speed, longitudinal acceleration, lateral
/// acceleration, curvature, safety. The first violation rejects the whole
/// trajectory. The field value e is filled in for every point.
inline void check_constraints(CandidateTrajectory& traj, const ConstraintSpec& spec,
                              std::span<const ObstacleState> obstacles, const FieldWeights& fw) {
  traj.feasible = true;
  traj.violation.reset();
  traj.violation_point = 0;
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    auto& p = traj.points[i];
    p.e = total_obstacle_field(obstacles, fw, {p.x, p.y});
    if (!traj.feasible) continue;
    std::optional<Constraint> bad;
    if (p.v < spec.v_min || p.v > spec.v_max) bad = Constraint::kSpeed;
    else if (p.a_y < spec.ay_min || p.a_y > spec.ay_max) bad = Constraint::kLongitudinalAccel;
    else if (p.a_x < spec.ax_min || p.a_x > spec.ax_max) bad = Constraint::kLateralAccel;
    else if (p.c < spec.c_min || p.c > spec.c_max) bad = Constraint::kCurvature;
    else if (p.e < 0.0 || p.e > spec.e_thld) bad = Constraint::kSafety;
    if (bad) {
      traj.feasible = false;
      traj.violation = bad;
      traj.violation_point = i;
    }
  }
}

inline double weighted_square(const FrenetState& a, const FrenetState& b, const StateWeights& w) {
  const auto va = a.as_vector(), vb = b.as_vector();
  double sum = 0.0;
  for (std::size_t k = 0; k < 7; ++k) {
    const double diff = va[k] - vb[k];
    sum += w[k] * diff * diff;
  }
  return sum;
}

/// Smoothness, target deviation, safety and consistency terms. Without a
/// previous terminal state the consistency term is zero.
inline CostBreakdown evaluate_cost(const CandidateTrajectory& traj, const CostWeights& w, const FrenetState& target,
                                   const std::optional<FrenetState>& previous) {
  CostBreakdown cb;
  double max_ax = 0.0, jerk = 0.0, max_e = 0.0;
  for (const auto& p : traj.points) {
    max_ax = std::max(max_ax, std::abs(p.a_x));
    jerk += w.w_s * std::abs(p.s_ddd) + w.w_d * std::abs(p.d_ddd);
    max_e = std::max(max_e, p.e);
  }
  cb.j_s = w.w_a * max_ax + jerk;
  cb.j_t = weighted_square(traj.terminal, target, w.w_t);
  cb.j_e = w.w_e * max_e;
  cb.j_c = previous ? weighted_square(traj.terminal, *previous, w.w_c) : 0.0;
  cb.total = cb.j_s + cb.j_t + cb.j_e + cb.j_c;
  return cb;
}

class NoFeasibleTrajectory : public Error {
 public:
  NoFeasibleTrajectory(std::array<std::size_t, kConstraintCount> rejections, std::size_t dropped)
      : Error(ErrorCode::kNoFeasibleTrajectory, describe(rejections, dropped)),
        rejections_(rejections),
        dropped_(dropped) {}

  const std::array<std::size_t, kConstraintCount>& rejections() const { return rejections_; }
  std::size_t dropped() const { return dropped_; }

 private:
  static std::string describe(const std::array<std::size_t, kConstraintCount>& r, std::size_t dropped) {
    std::string s = "no feasible trajectory:";
    for (std::size_t k = 0; k < kConstraintCount; ++k) {
      s += std::string(" ") + to_string(static_cast<Constraint>(k)) + "=" + std::to_string(r[k]);
    }
    s += " out_of_domain=" + std::to_string(dropped);
    return s;
  }
  std::array<std::size_t, kConstraintCount> rejections_;
  std::size_t dropped_;
};

struct LocalPlannerConfig {
  SamplingSpec sampling;
  ConstraintSpec constraints;
  CostWeights weights;
  FieldWeights field_weights;
  bool approximate_ay = false;
  unsigned threads = 1;
};

struct PlanStepResult {
  CandidateTrajectory best;
  std::vector<CandidateTrajectory> candidates;  // every in-domain candidate, generation order
  std::size_t dropped = 0;
  std::array<std::size_t, kConstraintCount> rejections{};
  FrenetState target;
};

/// Receding-horizon sampling planner. Keeps the previous winner's terminal
/// state for the consistency cost.
class LocalPlanner {
 public:
  LocalPlanner(ReferencePath ref, LocalPlannerConfig cfg) : ref_(std::move(ref)), cfg_(std::move(cfg)) {
    cfg_.sampling.validate();
    cfg_.constraints.validate();
    cfg_.weights.validate();
    cfg_.field_weights.validate();
  }

  const ReferencePath& reference() const { return ref_; }
  const LocalPlannerConfig& config() const { return cfg_; }
  const std::optional<FrenetState>& previous_terminal() const { return previous_; }
  void reset() { previous_.reset(); }

  PlanStepResult plan_step(const FrenetState& current, std::span<const ObstacleState> obstacles) {
    const std::vector<ObstacleState> snapshot(obstacles.begin(), obstacles.end());
    PlanStepResult res;
    CandidateSet set = generate_candidates(ref_, current, cfg_.sampling);
    res.dropped = set.dropped;
    res.target = set.target;
    res.candidates = std::move(set.candidates);
    parallel_for(
        res.candidates.size(),
        [&](std::size_t i) {
          auto& c = res.candidates[i];
          annotate_kinematics(c, ref_, cfg_.sampling.dt, cfg_.approximate_ay);
          check_constraints(c, cfg_.constraints, snapshot, cfg_.field_weights);
          if (c.feasible) c.cost = evaluate_cost(c, cfg_.weights, res.target, previous_);
        },
        cfg_.threads);

    const CandidateTrajectory* best = nullptr;
    for (const auto& c : res.candidates) {
      if (!c.feasible) {
        ++res.rejections[static_cast<std::size_t>(*c.violation)];
        continue;
      }
      if (!best || c.cost.total < best->cost.total) best = &c;
    }
    if (!best) throw NoFeasibleTrajectory(res.rejections, res.dropped);
    res.best = *best;
    previous_ = res.best.terminal;
    return res;
  }

 private:
  ReferencePath ref_;
  LocalPlannerConfig cfg_;
  std::optional<FrenetState> previous_;
};

}  // namespace riskplan
