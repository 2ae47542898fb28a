#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "oracles.hpp"
#include "riskplan/io.hpp"
#include "riskplan/smoother.hpp"

using namespace riskplan;

namespace {

std::vector<Vec2> l_path() {
  const auto file = oracle::data_dir() / "l_path.csv";
  return path_from_csv(read_text(file), file.string());
}

// Projected gradient of the window QP, computed from scratch.
double independent_kkt(const BoxQp& qp, const Eigen::VectorXd& x) {
  const Eigen::VectorXd g = 2.0 * qp.Q * x + qp.c;
  double sq = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double pg = g[i];
    if (qp.lower[i] == qp.upper[i]) pg = 0.0;
    else if (x[i] <= qp.lower[i]) pg = std::min(pg, 0.0);
    else if (x[i] >= qp.upper[i]) pg = std::max(pg, 0.0);
    sq += pg * pg;
  }
  return std::sqrt(sq);
}

Eigen::VectorXd flatten(const std::vector<Vec2>& nodes) {
  Eigen::VectorXd x(2 * nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    x[2 * i] = nodes[i].x;
    x[2 * i + 1] = nodes[i].y;
  }
  return x;
}

}  // namespace

TEST(BuildQp, ThreeNodeAssemblyMatchesSymbolicSum) {
  const std::vector<Vec2> ref{{0, 0}, {1, 2}, {3, 1}};
  const SmoothingWeights w{10.0, 1.0, 0.5};
  const BoxQp qp = build_qp(ref, w, 2.0, {});
  const double a1[3][3] = {{1, -2, 1}, {-2, 4, -2}, {1, -2, 1}};
  const double a2[3][3] = {{1, -1, 0}, {-1, 2, -1}, {0, -1, 1}};
  for (int axis = 0; axis < 2; ++axis)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const double want = w.w1 * a1[i][j] + w.w2 * a2[i][j] + (i == j ? w.w3 : 0.0);
        EXPECT_DOUBLE_EQ(qp.Q(2 * i + axis, 2 * j + axis), want);
        EXPECT_EQ(qp.Q(2 * i + axis, 2 * j + 1 - axis), 0.0);
      }
  EXPECT_DOUBLE_EQ(qp.c[2], -2.0 * w.w3 * 1.0);
  EXPECT_DOUBLE_EQ(qp.c[3], -2.0 * w.w3 * 2.0);
  EXPECT_DOUBLE_EQ(qp.lower[4], 2.0);
  EXPECT_DOUBLE_EQ(qp.upper[5], 2.0);
}

TEST(BuildQp, MinEigenvalueAtLeastW3) {
  std::mt19937_64 rng(3);
  const auto nodes = oracle::random_reference_nodes(rng, 30);
  const SmoothingWeights w{10.0, 1.0, 0.1};
  const BoxQp qp = build_qp(nodes, w, 1.0, {});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qp.Q);
  EXPECT_GE(es.eigenvalues().minCoeff(), w.w3 - 1e-12);
}

TEST(BuildQp, CostMatchesQuadraticForm) {
  std::mt19937_64 rng(4);
  const auto ref = oracle::random_reference_nodes(rng, 12);
  auto moved = ref;
  for (auto& p : moved) p = p + Vec2{0.1, -0.2};
  const SmoothingWeights w;
  const BoxQp qp = build_qp(ref, w, 1.0, {});
  EXPECT_NEAR(qp.objective(flatten(moved)), smoothing_cost(moved, ref, w), 1e-9);
}

TEST(SolveBoxQp, InteriorSolutionIsStationary) {
  std::mt19937_64 rng(5);
  auto qp = oracle::random_box_qp(rng, 8);
  qp.lower.setConstant(-1e6);
  qp.upper.setConstant(1e6);
  const auto sol = solve_box_qp(qp, 1e-10);
  const Eigen::VectorXd exact = qp.Q.llt().solve(-0.5 * qp.c);
  EXPECT_LT((sol.x - exact).norm(), 1e-8);
}

TEST(SolveBoxQp, ZeroWidthBoxPins) {
  std::mt19937_64 rng(6);
  auto qp = oracle::random_box_qp(rng, 6);
  qp.upper = qp.lower;
  const auto sol = solve_box_qp(qp);
  EXPECT_EQ(sol.x, qp.lower);
}

TEST(SolveBoxQp, MatchesNestedGridOracle) {
  std::mt19937_64 rng(2718);
  for (int k = 0; k < 100; ++k) {
    const auto qp = oracle::random_box_qp(rng, 10);
    const auto sol = solve_box_qp(qp, 1e-9);
    EXPECT_NEAR(sol.objective, oracle::grid_qp_minimum(qp), 1e-4) << "instance " << k;
    EXPECT_LE(independent_kkt(qp, sol.x), 1e-9);
  }
}

TEST(SolveBoxQp, RejectsInconsistentInput) {
  BoxQp qp;
  qp.Q = Eigen::MatrixXd::Identity(2, 2);
  qp.c = Eigen::VectorXd::Zero(2);
  qp.lower = Eigen::VectorXd::Ones(2);
  qp.upper = Eigen::VectorXd::Zero(2);
  EXPECT_THROW(solve_box_qp(qp), Error);
}

TEST(RollingSmooth, StraightPathUnchanged) {
  std::vector<Vec2> line;
  for (int i = 0; i < 30; ++i) line.push_back({2.0 * i, 1.0 * i});
  const auto out = rolling_smooth(line, RollingOptions{});
  EXPECT_EQ(out.windows, 1u);
  for (std::size_t i = 0; i < line.size(); ++i) EXPECT_LT(distance(out.nodes[i], line[i]), 1e-6);
}

TEST(RollingSmooth, LPathWithSmallWindows) {
  const auto path = l_path();
  ASSERT_EQ(path.size(), 60u);
  RollingOptions opt;
  opt.n_o = 20;
  opt.n_b = 5;
  const auto out = rolling_smooth(path, opt);
  EXPECT_GT(out.windows, 1u);
  EXPECT_EQ(out.nodes.front(), path.front());
  EXPECT_EQ(out.nodes.back(), path.back());
  const double half = 0.5 * opt.s_s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    EXPECT_LE(std::abs(out.nodes[i].x - path[i].x), half);
    EXPECT_LE(std::abs(out.nodes[i].y - path[i].y), half);
  }
  EXPECT_LT(smoothing_cost(out.nodes, path, opt.weights), smoothing_cost(path, path, opt.weights));
  EXPECT_LE(out.max_kkt_residual, 1e-6);
  // The corner is rounded.
  EXPECT_GT(distance(out.nodes[29], path[29]), 0.5);
}

TEST(RollingSmooth, SingleWindowIsTheFullOptimum) {
  const auto path = l_path();
  RollingOptions opt;
  opt.n_o = 60;
  const auto out = rolling_smooth(path, opt);
  EXPECT_EQ(out.windows, 1u);
  const BoxQp qp = build_qp(path, opt.weights, opt.s_s, std::vector<PinnedNode>{{0, path[0]}, {59, path[59]}});
  EXPECT_LE(independent_kkt(qp, flatten(out.nodes)), 1e-6);
}

TEST(RollingSmooth, StitchedPathStaysSmooth) {
  const auto path = l_path();
  RollingOptions opt;
  opt.n_o = 20;
  opt.n_b = 5;
  const auto out = rolling_smooth(path, opt);
  double in_max = 0.0, out_max = 0.0;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    in_max = std::max(in_max, (path[i - 1] + path[i + 1] - path[i] * 2.0).norm());
    out_max = std::max(out_max, (out.nodes[i - 1] + out.nodes[i + 1] - out.nodes[i] * 2.0).norm());
  }
  EXPECT_LT(out_max, in_max);
  // Each step stays short: no jump at a window seam.
  for (std::size_t i = 1; i < path.size(); ++i) EXPECT_LT(distance(out.nodes[i - 1], out.nodes[i]), 1.5);
}

TEST(RollingSmooth, DefaultWindowsAndValidation) {
  const auto path = l_path();
  const auto out = rolling_smooth(path, RollingOptions{});
  EXPECT_EQ(out.windows, 2u);
  EXPECT_LE(out.max_kkt_residual, 1e-6);
  RollingOptions bad;
  bad.n_o = 5;
  bad.n_b = 4;
  EXPECT_THROW(rolling_smooth(path, bad), Error);
  EXPECT_THROW(rolling_smooth(std::vector<Vec2>{{0, 0}}, RollingOptions{}), Error);
}
