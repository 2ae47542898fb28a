#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "riskplan/riskfield.hpp"

using namespace riskplan;

namespace {

StaticRiskSource disc_source(Vec2 c, double radius, double k_s, double r_min, double r_max, double n = 4.0) {
  StaticRiskSource s;
  s.center = c;
  s.geometry = Disc{radius};
  s.k_s = k_s;
  s.r_min = r_min;
  s.r_max = r_max;
  s.n_order = n;
  return s;
}

ObstacleState obstacle(double K, double r_min, double r_max, double k1 = 1.0, double k2 = 0.05) {
  ObstacleState o;
  o.K = K;
  o.r_min = r_min;
  o.r_max = r_max;
  o.k1 = k1;
  o.k2 = k2;
  return o;
}

}  // namespace

TEST(StaticPotential, HandEvaluatedValues) {
  const auto s = disc_source({0, 0}, 0.0, 1.0, 10.0, 20.0);
  EXPECT_EQ(static_potential_at_distance(s, 25.0), 0.0);
  EXPECT_EQ(static_potential_at_distance(s, 5.0), 1.0);
  EXPECT_NEAR(static_potential_at_distance(s, 15.0), (225.0 - 400.0) / (100.0 - 400.0), 1e-12);
  EXPECT_NEAR(static_potential_at_distance(s, 15.0), 0.58333, 1e-5);
}

TEST(StaticPotential, BoundaryDistanceOfShapes) {
  const auto d = disc_source({10, 10}, 5.0, 1.0, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(boundary_distance(d, {10, 22}), 7.0);
  EXPECT_EQ(boundary_distance(d, {11, 11}), 0.0);
  StaticRiskSource r = d;
  r.geometry = Rect{4.0, 2.0};
  EXPECT_DOUBLE_EQ(boundary_distance(r, {15, 10}), 3.0);
  EXPECT_DOUBLE_EQ(boundary_distance(r, {15, 14}), std::sqrt(18.0));
  EXPECT_EQ(boundary_distance(r, {11, 10.5}), 0.0);
}

TEST(StaticField, EmptySceneIsZero) {
  RiskScene scene;
  scene.width = scene.height = 100;
  EXPECT_EQ(total_static_field(scene, {3, 4}), 0.0);
}

TEST(StaticField, CoLocatedSourcesAdd) {
  RiskScene scene;
  scene.width = scene.height = 100;
  scene.static_sources.push_back(disc_source({50, 50}, 2.0, 3.0, 5.0, 30.0));
  const double single = total_static_field(scene, {50, 70});
  scene.static_sources.push_back(scene.static_sources.front());
  EXPECT_DOUBLE_EQ(total_static_field(scene, {50, 70}), 2.0 * single);
}

TEST(StaticField, MatchesPerSourceSumAndIgnoresOrder) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RiskScene scene;
  scene.width = scene.height = 200;
  for (int i = 0; i < 6; ++i)
    scene.static_sources.push_back(
        disc_source({200 * u(rng), 200 * u(rng)}, 10 * u(rng), 1 + 9 * u(rng), 2 + 3 * u(rng), 20 + 30 * u(rng)));
  for (int k = 0; k < 200; ++k) {
    const Vec2 p{200 * u(rng), 200 * u(rng)};
    double oracle_sum = 0.0;
    for (const auto& s : scene.static_sources) {
      const double r = std::max(0.0, std::hypot(p.x - s.center.x, p.y - s.center.y) - std::get<Disc>(s.geometry).radius);
      oracle_sum += oracle::static_field(s.k_s, s.r_min, s.r_max, s.n_order, r);
    }
    EXPECT_NEAR(total_static_field(scene, p), oracle_sum, 1e-12);
    RiskScene reversed = scene;
    std::reverse(reversed.static_sources.begin(), reversed.static_sources.end());
    EXPECT_NEAR(total_static_field(reversed, p), oracle_sum, 1e-12);
  }
}

TEST(ObstaclePotential, StaticComponent) {
  EXPECT_EQ(obstacle_static_at_distance(obstacle(2, 1, 10), 11.0), 0.0);
  EXPECT_DOUBLE_EQ(obstacle_static_at_distance(obstacle(2, 1, 10), 0.5), 2.0);
  // r_P = 4/3; (4/3)(1/2.25 - 1/4) = 0.259259...
  EXPECT_NEAR(obstacle_static_at_distance(obstacle(1, 1, 2), 1.5), (4.0 / 3.0) * (1.0 / 2.25 - 0.25), 1e-14);
  EXPECT_NEAR(obstacle_static_at_distance(obstacle(1, 1, 2), 1.5), 0.259259, 1e-6);
}

TEST(ObstaclePotential, DynamicComponent) {
  auto o = obstacle(1, 0.5, 10, 2.0);
  EXPECT_DOUBLE_EQ(obstacle_dynamic_potential(o, {2, 0}), 0.25);
  auto m = obstacle(1, 1, 10, 1.0, 0.05);
  m.velocity = {10, 0};
  EXPECT_NEAR(obstacle_dynamic_potential(m, {5, 0}), 0.2 * std::exp(0.5), 1e-12);
  EXPECT_NEAR(obstacle_dynamic_potential(m, {5, 0}), 0.32974, 1e-5);
  // Sideways the speed has no effect.
  auto still = m;
  still.velocity = {0, 0};
  EXPECT_NEAR(obstacle_dynamic_potential(m, {0, 5}), obstacle_dynamic_potential(still, {0, 5}), 1e-15);
  // Behind the obstacle the field shrinks.
  EXPECT_LT(obstacle_dynamic_potential(m, {-5, 0}), obstacle_dynamic_potential(still, {-5, 0}));
  EXPECT_THROW(obstacle_dynamic_potential(m, {0, 0}), Error);
}

TEST(ObstaclePotential, DynamicSaturatesAtCap) {
  auto o = obstacle(1, 1, 10, 1.0, 0.05);
  o.velocity = {10, 0};
  EXPECT_DOUBLE_EQ(obstacle_dynamic_potential(o, {1e-6, 0}), obstacle_dynamic_cap(o));
}

TEST(ObstaclePotential, WeightedCombination) {
  auto o = obstacle(1, 1, 2, 1.0, 0.05);
  o.velocity = {10, 0};
  const Vec2 p{1.5, 0};
  EXPECT_DOUBLE_EQ(obstacle_potential(o, {1.0, 0.0}, p), obstacle_static_potential(o, p));
  EXPECT_NEAR(obstacle_potential(o, {1.0, 1.0}, p), obstacle_static_potential(o, p) + obstacle_dynamic_potential(o, p),
              1e-15);
  auto still = obstacle(1, 1, 10, 2.0);
  EXPECT_DOUBLE_EQ(obstacle_potential(still, {0.0, 0.7}, {3, 0}), 0.7 / 9.0);
}

TEST(ObstaclePotential, TotalFieldMatchesOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ObstacleState> obs;
  for (int i = 0; i < 4; ++i) {
    auto o = obstacle(1 + 5 * std::abs(u(rng)), 1 + std::abs(u(rng)), 8 + 4 * std::abs(u(rng)));
    o.position = {20 * u(rng), 20 * u(rng)};
    o.velocity = {3 * u(rng), 3 * u(rng)};
    obs.push_back(o);
  }
  const FieldWeights w{0.3, 0.7};
  for (int k = 0; k < 300; ++k) {
    const Vec2 p{25 * u(rng), 25 * u(rng)};
    EXPECT_NEAR(total_obstacle_field(obs, w, p), oracle::obstacle_total(obs, w, p), 1e-12);
  }
  EXPECT_NEAR(total_obstacle_field(obs, w, obs[0].position), oracle::obstacle_total(obs, w, obs[0].position), 1e-12);
}

TEST(Rasterize, ZeroFieldAndPointwiseOracle) {
  const auto zero = rasterize([](const Vec2&) { return 0.0; }, {0, 0}, 1.0, 4, 3);
  for (double v : zero.values) EXPECT_EQ(v, 0.0);

  RiskScene scene;
  scene.width = scene.height = 30;
  scene.static_sources.push_back(disc_source({15, 15}, 1.0, 2.0, 3.0, 14.0));
  const FieldRaster r = rasterize_static(scene, 10.0);
  ASSERT_EQ(r.width, 3u);
  ASSERT_EQ(r.height, 3u);
  for (std::size_t row = 0; row < 3; ++row)
    for (std::size_t col = 0; col < 3; ++col) {
      const Vec2 c{10.0 * col + 5.0, 10.0 * row + 5.0};
      const double rr = std::max(0.0, std::hypot(c.x - 15, c.y - 15) - 1.0);
      EXPECT_NEAR(r.at(col, row), oracle::static_field(2.0, 3.0, 14.0, 4.0, rr), 1e-12);
    }
  // Radial symmetry around a centered source.
  EXPECT_DOUBLE_EQ(r.at(0, 0), r.at(2, 2));
  EXPECT_DOUBLE_EQ(r.at(0, 1), r.at(1, 0));
}

TEST(Rasterize, ParallelMatchesSerial) {
  RiskScene scene;
  scene.width = scene.height = 100;
  scene.static_sources.push_back(disc_source({40, 60}, 5.0, 2.0, 3.0, 30.0));
  const auto a = rasterize_static(scene, 1.0, 1);
  const auto b = rasterize_static(scene, 1.0, 4);
  EXPECT_EQ(a.values, b.values);
}

TEST(SourceValidation, RejectsBadParameters) {
  auto s = disc_source({0, 0}, 1.0, 1.0, 5.0, 4.0);
  EXPECT_THROW(s.validate(), Error);
  auto o = obstacle(1, 2, 1);
  EXPECT_THROW(o.validate(), Error);
}
