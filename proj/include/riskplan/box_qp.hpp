#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "riskplan/common.hpp"

namespace riskplan {

/// minimize x'Qx + c'x  subject to  lower <= x <= upper.
/// Q must be symmetric positive definite; lower == upper pins a coordinate.
struct BoxQp {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index dim() const { return c.size(); }

  double objective(const Eigen::VectorXd& x) const { return x.dot(Q * x) + c.dot(x); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return 2.0 * (Q * x) + c; }

  void validate() const {
    const auto n = c.size();
    if (Q.rows() != n || Q.cols() != n || lower.size() != n || upper.size() != n)
      throw Error(ErrorCode::kInvalidArgument, "box qp: inconsistent dimensions");
    if (!Q.isApprox(Q.transpose(), 1e-12)) throw Error(ErrorCode::kInvalidArgument, "box qp: Q is not symmetric");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(lower[i] <= upper[i])) throw Error(ErrorCode::kInvalidArgument, "box qp: lower bound exceeds upper bound");
    }
  }
};

struct QpSolution {
  Eigen::VectorXd x;
  double objective = 0.0;
  double kkt_residual = 0.0;  // Euclidean norm of the projected gradient
  int iterations = 0;
};

inline Eigen::VectorXd project_to_box(const BoxQp& qp, const Eigen::VectorXd& x) {
  return x.cwiseMax(qp.lower).cwiseMin(qp.upper);
}

/// Gradient with components that push against an active bound removed;
/// zero exactly at a KKT point of the box-constrained problem.
inline Eigen::VectorXd projected_gradient(const BoxQp& qp, const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (qp.lower[i] == qp.upper[i]) {
      pg[i] = 0.0;
    } else if (x[i] <= qp.lower[i]) {
      pg[i] = std::min(g[i], 0.0);
    } else if (x[i] >= qp.upper[i]) {
      pg[i] = std::max(g[i], 0.0);
    }
  }
  return pg;
}

inline double kkt_residual(const BoxQp& qp, const Eigen::VectorXd& x) {
  return projected_gradient(qp, x, qp.gradient(x)).norm();
}

/// Strictly convex box QP by alternating a projected-gradient (Cauchy) step
/// with a Newton step on the current free face. Each step is an Armijo
/// projected search, so the objective decreases monotonically; once the
/// active set settles the Newton step lands on the exact minimizer.
inline QpSolution solve_box_qp(const BoxQp& qp, double tol = 1e-6, int max_iterations = 10000,
                               std::optional<Eigen::VectorXd> x0 = std::nullopt) {
  qp.validate();
  const Eigen::Index n = qp.dim();
  constexpr double kArmijo = 1e-4;
  Eigen::VectorXd x = project_to_box(qp, x0.value_or(0.5 * (qp.lower + qp.upper)));
  double fx = qp.objective(x);

  auto projected_search = [&](const Eigen::VectorXd& dir, double alpha, const Eigen::VectorXd& g) {
    for (int k = 0; k < 60; ++k) {
      Eigen::VectorXd cand = project_to_box(qp, x + alpha * dir);
      const double fc = qp.objective(cand);
      if (fc <= fx + kArmijo * g.dot(cand - x)) {
        x = std::move(cand);
        fx = fc;
        return true;
      }
      alpha *= 0.5;
    }
    return false;
  };

  QpSolution sol;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd g = qp.gradient(x);
    const double residual = projected_gradient(qp, x, g).norm();
    if (residual <= tol) {
      sol.x = x;
      sol.objective = fx;
      sol.kkt_residual = residual;
      sol.iterations = it;
      return sol;
    }

    // Cauchy step along -g with the exact unconstrained step length.
    const double curvature = 2.0 * g.dot(qp.Q * g);
    if (curvature > 0.0) projected_search(-g, g.squaredNorm() / curvature, g);

    // Newton step restricted to the free face.
    g = qp.gradient(x);
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (qp.lower[i] == qp.upper[i]) continue;
      const bool at_lower = x[i] <= qp.lower[i] && g[i] >= 0.0;
      const bool at_upper = x[i] >= qp.upper[i] && g[i] <= 0.0;
      if (!at_lower && !at_upper) free.push_back(i);
    }
    if (free.empty()) continue;
    const auto m = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd H(m, m);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      rhs[a] = -g[free[a]];
      for (Eigen::Index b = 0; b < m; ++b) H(a, b) = 2.0 * qp.Q(free[a], free[b]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::kInvalidArgument, "box qp: Q is not positive definite");
    const Eigen::VectorXd step = llt.solve(rhs);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < m; ++a) dir[free[a]] = step[a];
    projected_search(dir, 1.0, g);
  }
  throw Error(ErrorCode::kSolverNotConverged,
              "box qp: no convergence within " + std::to_string(max_iterations) + " iterations");
}

}  // namespace riskplan
