#pragma once

#include <string>
#include <vector>

#include "riskplan/config.hpp"
#include "riskplan/frenet.hpp"
#include "riskplan/global_planner.hpp"
#include "riskplan/smoother.hpp"
#include "riskplan/uncmap.hpp"

namespace riskplan {

enum class GlobalAlgo { kCoarse2Fine, kImproved, kTraditional };

inline GlobalAlgo parse_algo(const std::string& name) {
  if (name == "c2f") return GlobalAlgo::kCoarse2Fine;
  if (name == "iastar") return GlobalAlgo::kImproved;
  if (name == "tastar") return GlobalAlgo::kTraditional;
  throw Error(ErrorCode::kInvalidArgument, "unknown algorithm '" + name + "' (expected c2f, iastar or tastar)");
}

inline const char* to_string(GlobalAlgo a) {
  switch (a) {
    case GlobalAlgo::kCoarse2Fine: return "c2f";
    case GlobalAlgo::kImproved: return "iastar";
    case GlobalAlgo::kTraditional: return "tastar";
  }
  return "unknown";
}

inline double effective_block_threshold(const RiskScene& scene, const MapConfig& cfg) {
  return cfg.block_threshold > 0.0 ? cfg.block_threshold : default_block_threshold(scene);
}

/// Static field rasterized on the finest stride, normalized and pooled.
inline MapPyramid build_scene_pyramid(const RiskScene& scene, const MapConfig& cfg, unsigned threads = 1) {
  scene.validate();
  const FieldRaster raster = rasterize_static(scene, cfg.strides.front(), threads);
  return build_pyramid(raster, cfg.strides, cfg.lambda, effective_block_threshold(scene, cfg), cfg.u_cap);
}

inline PlanResult plan_global(const Vec2& start, const Vec2& goal, const MapPyramid& pyramid, GlobalAlgo algo,
                              const Coarse2FineOptions& opt) {
  switch (algo) {
    case GlobalAlgo::kCoarse2Fine: return coarse2fine_plan(start, goal, pyramid, opt);
    case GlobalAlgo::kImproved: return improved_astar(start, goal, pyramid.fine());
    case GlobalAlgo::kTraditional: return traditional_astar(start, goal, pyramid.fine());
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown algorithm");
}

/// Straight continuation of the last segment so that the local planner's
/// lattice stays inside the reference domain near the goal.
inline std::vector<Vec2> extend_path(std::vector<Vec2> nodes, double length) {
  if (nodes.size() < 2 || !(length > 0.0)) return nodes;
  std::size_t k = nodes.size() - 1;
  while (k > 0 && nodes[k - 1] == nodes.back()) --k;
  if (k == 0) return nodes;
  const Vec2 dir = nodes.back() - nodes[k - 1];
  nodes.push_back(nodes.back() + dir * (length / dir.norm()));
  return nodes;
}

/// Arclength the local planner may look ahead from any state.
inline double lookahead_length(const LocalPlannerConfig& cfg) {
  const auto& s = cfg.sampling;
  return s.s_max_ratio * std::max(cfg.constraints.v_max, s.min_reference_speed) * s.t_ref + 10.0;
}

// Grid paths start and end on cell centers; a reference should start
// exactly where the vehicle is and end at the goal.
inline std::vector<Vec2> pin_endpoints(std::vector<Vec2> nodes, const Vec2& start, const Vec2& goal) {
  if (nodes.empty()) return {start, goal};
  nodes.front() = start;
  if (nodes.size() > 1) nodes.back() = goal;
  else nodes.push_back(goal);
  return nodes;
}

struct GlobalPipelineResult {
  MapPyramid pyramid;
  PlanResult raw;
  SmoothedPath smoothed;
  ReferencePath reference;
};

/// map -> Coarse2fine A* -> rolling QP smoothing -> reference path.
inline GlobalPipelineResult run_global_pipeline(const RiskScene& scene, const Vec2& start, const Vec2& goal,
                                                const PlannerConfig& cfg) {
  GlobalPipelineResult r;
  r.pyramid = build_scene_pyramid(scene, cfg.map, cfg.global.threads);
  r.raw = coarse2fine_plan(start, goal, r.pyramid, cfg.global);
  r.smoothed = rolling_smooth(pin_endpoints(r.raw.path.nodes, start, goal), cfg.smoother);
  r.reference = build_reference(extend_path(r.smoothed.nodes, lookahead_length(cfg.local)), cfg.reference_ds);
  return r;
}

}  // namespace riskplan
