// Builds a small off-road scene in code, plans a global path around the
// risky areas, then drives it closed loop past a crossing obstacle.
#include <cstdio>

#include "riskplan/sim.hpp"

using namespace riskplan;

int main() {
  Scenario sc;
  sc.name = "demo";
  sc.scene.width = 200.0;
  sc.scene.height = 200.0;

  StaticRiskSource swamp;
  swamp.center = {100.0, 100.0};
  swamp.geometry = Rect{60.0, 40.0};
  swamp.k_s = 10.0;
  swamp.r_min = 5.0;
  swamp.r_max = 35.0;
  StaticRiskSource rocks;
  rocks.center = {60.0, 160.0};
  rocks.geometry = Disc{12.0};
  rocks.k_s = 5.0;
  rocks.r_min = 5.0;
  rocks.r_max = 30.0;
  sc.scene.static_sources = {swamp, rocks};

  ObstacleState walker;
  walker.position = {175.0, 60.0};
  walker.K = 20.0;
  walker.r_min = 2.0;
  walker.r_max = 15.0;
  sc.scene.obstacles = {walker};
  sc.scripts = {{0, {{30.0, {-0.8, 0.0}}}}};

  sc.start = {15.0, 15.0};
  sc.goal = {170.0, 185.0};

  PlannerConfig cfg;
  cfg.map.strides = {1.0, 5.0, 20.0};
  cfg.smoother.s_s = 4.0;

  try {
    const GlobalPipelineResult g = run_global_pipeline(sc.scene, sc.start, sc.goal, cfg);
    std::printf("global: %zu nodes, %.1f m, mean U %.4f, %zu expansions\n", g.raw.path.nodes.size(),
                g.raw.stats.length_m, g.raw.stats.mean_uncertainty, g.raw.stats.expanded);

    const EpisodeLog log = run_episode(sc, g.reference, cfg.local);
    std::printf("episode: %s after %.2f s, %zu replans, max field %.3f\n", to_string(log.termination),
                log.end_time, log.ticks.size(), log.max_field);
    for (const auto& issue : audit_episode(log, cfg.local.constraints)) std::printf("  audit: %s\n", issue.c_str());
    return log.reached_goal() ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s: %s\n", to_string(e.code()), e.what());
    return 1;
  }
}
