#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "riskplan/box_qp.hpp"
#include "riskplan/common.hpp"

namespace riskplan {

struct SmoothingWeights {
  double w1 = 10.0;  // smoothness (second differences)
  double w2 = 1.0;   // compactness (first differences)
  double w3 = 0.5;   // similarity to the reference

  void validate() const {
    if (!(w1 > 0.0 && w2 > 0.0 && w3 > 0.0))
      throw Error(ErrorCode::kInvalidArgument, "smoothing weights must all be > 0");
  }
};

struct PinnedNode {
  std::size_t index = 0;
  Vec2 value;
};

/// Box QP over X = [x1, y1, ..., xn, yn]. Every node may deviate from its
/// reference by at most s_s / 2 per coordinate; pinned nodes are fixed to
/// the given value.
inline BoxQp build_qp(std::span<const Vec2> ref, const SmoothingWeights& w, double s_s,
                      std::span<const PinnedNode> pinned) {
  const std::size_t n = ref.size();
  if (n < 3) throw Error(ErrorCode::kInvalidArgument, "build_qp: need at least 3 nodes");
  if (!(s_s >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "build_qp: s_s must be >= 0");
  w.validate();
  const auto dim = static_cast<Eigen::Index>(2 * n);
  BoxQp qp;
  qp.Q = Eigen::MatrixXd::Zero(dim, dim);
  qp.c = Eigen::VectorXd::Zero(dim);
  qp.lower.resize(dim);
  qp.upper.resize(dim);

  for (int axis = 0; axis < 2; ++axis) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const Eigen::Index idx[3] = {static_cast<Eigen::Index>(2 * (i - 1)) + axis,
                                   static_cast<Eigen::Index>(2 * i) + axis,
                                   static_cast<Eigen::Index>(2 * (i + 1)) + axis};
      constexpr double stencil[3] = {1.0, -2.0, 1.0};
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) qp.Q(idx[a], idx[b]) += w.w1 * stencil[a] * stencil[b];
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const Eigen::Index p = static_cast<Eigen::Index>(2 * i) + axis, q = p + 2;
      qp.Q(p, p) += w.w2;
      qp.Q(q, q) += w.w2;
      qp.Q(p, q) -= w.w2;
      qp.Q(q, p) -= w.w2;
    }
  }
  const double half = 0.5 * s_s;
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Index ix = static_cast<Eigen::Index>(2 * i), iy = ix + 1;
    qp.Q(ix, ix) += w.w3;
    qp.Q(iy, iy) += w.w3;
    qp.c[ix] = w.w3 * -2.0 * ref[i].x;
    qp.c[iy] = w.w3 * -2.0 * ref[i].y;
    qp.lower[ix] = ref[i].x - half;
    qp.upper[ix] = ref[i].x + half;
    qp.lower[iy] = ref[i].y - half;
    qp.upper[iy] = ref[i].y + half;
  }
  for (const auto& p : pinned) {
    if (p.index >= n) throw Error(ErrorCode::kInvalidArgument, "build_qp: pinned index out of range");
    const Eigen::Index ix = static_cast<Eigen::Index>(2 * p.index);
    qp.lower[ix] = qp.upper[ix] = p.value.x;
    qp.lower[ix + 1] = qp.upper[ix + 1] = p.value.y;
  }
  return qp;
}

/// Weighted smoothing objective (similarity term without its constant).
inline double smoothing_cost(std::span<const Vec2> nodes, std::span<const Vec2> ref, const SmoothingWeights& w) {
  if (nodes.size() != ref.size()) throw Error(ErrorCode::kInvalidArgument, "smoothing_cost: size mismatch");
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
  const std::size_t n = nodes.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const Vec2 dd = nodes[i - 1] + nodes[i + 1] - nodes[i] * 2.0;
    c1 += dd.dot(dd);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Vec2 d = nodes[i] - nodes[i + 1];
    c2 += d.dot(d);
  }
  for (std::size_t i = 0; i < n; ++i) {
    c3 += nodes[i].dot(nodes[i]) - 2.0 * ref[i].dot(nodes[i]);
  }
  return w.w1 * c1 + w.w2 * c2 + w.w3 * c3;
}

struct SmoothedPath {
  std::vector<Vec2> nodes;
  std::size_t windows = 0;
  double max_kkt_residual = 0.0;
};

struct RollingOptions {
  SmoothingWeights weights;
  double s_s = 10.0;
  std::size_t n_o = 50;
  std::size_t n_b = 10;
  double tol = 1e-6;
  int max_iterations = 10000;
};

/// Rolling-window smoothing with path stitching. The first window pins the
/// start; later windows pin the already-optimized nodes behind the last
/// optimized one; the final window also pins the goal.
inline SmoothedPath rolling_smooth(std::span<const Vec2> path, const RollingOptions& opt) {
  const std::size_t n = path.size();
  if (n < 2) throw Error(ErrorCode::kInvalidArgument, "rolling_smooth: need at least 2 nodes");
  if (opt.n_o < 3 || opt.n_o < opt.n_b + 2)
    throw Error(ErrorCode::kInvalidArgument, "rolling_smooth: require n_o >= n_b + 2 and n_o >= 3");
  SmoothedPath out;
  out.nodes.assign(path.begin(), path.end());
  if (n == 2) return out;

  // Solves nodes [lo, hi] and writes back [write_from, hi].
  auto solve_window = [&](std::size_t lo, std::size_t hi, std::size_t write_from, std::vector<PinnedNode> pins) {
    const auto ref = path.subspan(lo, hi - lo + 1);
    for (auto& p : pins) p.index -= lo;
    const BoxQp qp = build_qp(ref, opt.weights, opt.s_s, pins);
    Eigen::VectorXd x0(qp.dim());
    for (std::size_t i = lo; i <= hi; ++i) {
      x0[static_cast<Eigen::Index>(2 * (i - lo))] = out.nodes[i].x;
      x0[static_cast<Eigen::Index>(2 * (i - lo)) + 1] = out.nodes[i].y;
    }
    QpSolution sol;
    try {
      sol = solve_box_qp(qp, opt.tol, opt.max_iterations, x0);
    } catch (const Error& e) {
      throw Error(e.code(), "rolling_smooth: window " + std::to_string(out.windows) + ": " + e.what());
    }
    for (std::size_t i = write_from; i <= hi; ++i) {
      const auto k = static_cast<Eigen::Index>(2 * (i - lo));
      out.nodes[i] = {sol.x[k], sol.x[k + 1]};
    }
    ++out.windows;
    out.max_kkt_residual = std::max(out.max_kkt_residual, sol.kkt_residual);
  };

  if (n <= opt.n_o) {
    solve_window(0, n - 1, 0, {{0, path[0]}, {n - 1, path[n - 1]}});
    return out;
  }

  solve_window(0, opt.n_o - 1, 0, {{0, path[0]}});
  std::size_t last = opt.n_o - 1;  // last optimized node, free in its window
  const std::size_t n_f = opt.n_o - opt.n_b - 1;
  while (last < n - 1) {
    // The final window may be shorter than n_o.
    const std::size_t lo = last - opt.n_b;
    const std::size_t hi = std::min(last + n_f, n - 1);
    std::vector<PinnedNode> pins;
    for (std::size_t i = lo; i < last; ++i) pins.push_back({i, out.nodes[i]});
    if (hi == n - 1) pins.push_back({n - 1, path[n - 1]});
    solve_window(lo, hi, last, std::move(pins));
    last = hi;
  }
  return out;
}

}  // namespace riskplan
