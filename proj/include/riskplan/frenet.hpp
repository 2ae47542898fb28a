#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "riskplan/common.hpp"

namespace riskplan {

/// Reference path sampled at uniform arclength. Heading is unwrapped.
struct ReferencePath {
  std::vector<double> s;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> theta;
  std::vector<double> kappa;
  double spacing = 0.0;

  std::size_t size() const { return s.size(); }
  double length() const { return s.empty() ? 0.0 : s.back(); }
  Vec2 point(std::size_t i) const { return {x[i], y[i]}; }
};

inline ReferencePath build_reference(std::span<const Vec2> nodes, double ds) {
  if (!(ds > 0.0)) throw Error(ErrorCode::kInvalidArgument, "build_reference: ds must be > 0");
  if (nodes.size() < 2) throw Error(ErrorCode::kInvalidArgument, "build_reference: need at least 2 nodes");
  std::vector<Vec2> pts;
  for (const auto& p : nodes) {
    if (pts.empty() || !(p == pts.back())) pts.push_back(p);
  }
  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i) cum[i] = cum[i - 1] + distance(pts[i - 1], pts[i]);
  const double total = cum.back();
  if (!(total > 0.0)) throw Error(ErrorCode::kInvalidArgument, "build_reference: zero-length path");

  const auto intervals = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total / ds - 1e-9)));
  ReferencePath ref;
  ref.spacing = total / static_cast<double>(intervals);
  const std::size_t m = intervals + 1;
  ref.s.resize(m);
  ref.x.resize(m);
  ref.y.resize(m);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double sk = k + 1 == m ? total : static_cast<double>(k) * ref.spacing;
    while (seg + 2 < pts.size() && cum[seg + 1] < sk) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? std::clamp((sk - cum[seg]) / len, 0.0, 1.0) : 0.0;
    const Vec2 p = pts[seg] + (pts[seg + 1] - pts[seg]) * t;
    ref.s[k] = sk;
    ref.x[k] = p.x;
    ref.y[k] = p.y;
  }

  ref.theta.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = k + 1 == m ? k : k + 1;
    ref.theta[k] = std::atan2(ref.y[b] - ref.y[a], ref.x[b] - ref.x[a]);
    if (k > 0) ref.theta[k] = ref.theta[k - 1] + wrap_angle(ref.theta[k] - ref.theta[k - 1]);
  }
  ref.kappa.assign(m, 0.0);
  if (m >= 3) {
    for (std::size_t k = 1; k + 1 < m; ++k) {
      ref.kappa[k] = (ref.theta[k + 1] - ref.theta[k - 1]) / (ref.s[k + 1] - ref.s[k - 1]);
    }
    ref.kappa[0] = ref.kappa[1];
    ref.kappa[m - 1] = ref.kappa[m - 2];
  }
  return ref;
}

struct ReferencePose {
  Vec2 point;
  double theta = 0.0;
  double kappa = 0.0;
};

inline constexpr double kDomainTolerance = 1e-9;

/// Interpolated pose at arclength s.
inline ReferencePose reference_pose(const ReferencePath& ref, double s) {
  if (ref.size() < 2) throw Error(ErrorCode::kInvalidArgument, "reference path has fewer than 2 samples");
  if (s < -kDomainTolerance || s > ref.length() + kDomainTolerance)
    throw Error(ErrorCode::kOutOfDomain, "arclength " + fmt_double(s) + " outside reference domain [0, " +
                                             fmt_double(ref.length()) + "]");
  s = std::clamp(s, 0.0, ref.length());
  auto k = static_cast<std::size_t>(s / ref.spacing);
  k = std::min(k, ref.size() - 2);
  const double t = (s - ref.s[k]) / (ref.s[k + 1] - ref.s[k]);
  ReferencePose pose;
  pose.point = {ref.x[k] + (ref.x[k + 1] - ref.x[k]) * t, ref.y[k] + (ref.y[k + 1] - ref.y[k]) * t};
  pose.theta = ref.theta[k] + (ref.theta[k + 1] - ref.theta[k]) * t;
  pose.kappa = ref.kappa[k] + (ref.kappa[k + 1] - ref.kappa[k]) * t;
  return pose;
}

/// Base point at s plus d along the left normal (positive d = left).
inline Vec2 frenet_to_world(const ReferencePath& ref, double s, double d) {
  const ReferencePose pose = reference_pose(ref, s);
  return {pose.point.x - d * std::sin(pose.theta), pose.point.y + d * std::cos(pose.theta)};
}

struct FrenetPoint {
  double s = 0.0;
  double d = 0.0;
  bool ambiguous = false;  // another projection was equally close
};

/// Exact inverse of frenet_to_world inside the projection tube: finds s with
/// (p - B(s)) orthogonal to the interpolated tangent at s.
inline FrenetPoint world_to_frenet(const ReferencePath& ref, const Vec2& p) {
  if (ref.size() < 2) throw Error(ErrorCode::kInvalidArgument, "reference path has fewer than 2 samples");
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double dx = ref.x[i] - p.x, dy = ref.y[i] - p.y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      nearest = i;
    }
  }
  auto along = [&](double s) {
    const ReferencePose pose = reference_pose(ref, s);
    const Vec2 rel = p - pose.point;
    return rel.x * std::cos(pose.theta) + rel.y * std::sin(pose.theta);
  };
  auto lateral = [&](double s) {
    const ReferencePose pose = reference_pose(ref, s);
    const Vec2 rel = p - pose.point;
    return -rel.x * std::sin(pose.theta) + rel.y * std::cos(pose.theta);
  };

  std::vector<FrenetPoint> roots;
  const std::size_t k0 = nearest >= 2 ? nearest - 2 : 0;
  const std::size_t k1 = std::min(ref.size() - 2, nearest + 1);
  for (std::size_t k = k0; k <= k1; ++k) {
    double lo = ref.s[k], hi = ref.s[k + 1];
    double flo = along(lo), fhi = along(hi);
    double root;
    if (flo == 0.0) {
      root = lo;
    } else if (fhi == 0.0) {
      root = hi;
    } else if ((flo > 0.0) == (fhi > 0.0)) {
      continue;
    } else {
      for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = along(mid);
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      root = 0.5 * (lo + hi);
    }
    roots.push_back({root, lateral(root), false});
  }
  if (roots.empty()) throw Error(ErrorCode::kOutOfDomain, "world_to_frenet: point projects outside the reference");

  constexpr double kTieTolerance = 1e-9;
  FrenetPoint pick = roots.front();
  for (const auto& r : roots) {
    if (std::abs(r.d) < std::abs(pick.d) - kTieTolerance) pick = r;
  }
  // Among near-equal candidates the smaller s wins; distinct ones flag ambiguity.
  for (const auto& r : roots) {
    if (std::abs(std::abs(r.d) - std::abs(pick.d)) <= kTieTolerance) {
      if (std::abs(r.s - pick.s) > 1e-6) pick.ambiguous = true;
      if (r.s < pick.s) {
        const bool amb = pick.ambiguous;
        pick = r;
        pick.ambiguous = amb;
      }
    }
  }
  return pick;
}

/// Degree-5 polynomial on [0, duration].
struct QuinticPoly {
  std::array<double, 6> c{};
  double duration = 0.0;

  double value(double t) const {
    return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
  }
  double d1(double t) const { return c[1] + t * (2 * c[2] + t * (3 * c[3] + t * (4 * c[4] + t * 5 * c[5]))); }
  double d2(double t) const { return 2 * c[2] + t * (6 * c[3] + t * (12 * c[4] + t * 20 * c[5])); }
  double d3(double t) const { return 6 * c[3] + t * (24 * c[4] + t * 60 * c[5]); }
};

/// Unique quintic matching position, velocity and acceleration at t = 0
/// and t = T.
inline QuinticPoly fit_quintic(double p0, double v0, double a0, double p1, double v1, double a1, double T) {
  if (!(T > 0.0)) throw Error(ErrorCode::kInvalidArgument, "fit_quintic: duration must be > 0");
  QuinticPoly q;
  q.duration = T;
  const double T2 = T * T, T3 = T2 * T;
  const double h = p1 - (p0 + v0 * T + 0.5 * a0 * T2);
  const double dv = v1 - (v0 + a0 * T);
  const double da = a1 - a0;
  q.c[0] = p0;
  q.c[1] = v0;
  q.c[2] = 0.5 * a0;
  q.c[3] = (10.0 * h - 4.0 * dv * T + 0.5 * da * T2) / T3;
  q.c[4] = (-15.0 * h + 7.0 * dv * T - da * T2) / (T3 * T);
  q.c[5] = (6.0 * h - 3.0 * dv * T + 0.5 * da * T2) / (T3 * T2);
  return q;
}

/// Point in the sampling space: time plus lateral and longitudinal
/// position, velocity and acceleration.
struct FrenetState {
  double t = 0.0;
  double s = 0.0;
  double s_d = 0.0;
  double s_dd = 0.0;
  double d = 0.0;
  double d_d = 0.0;
  double d_dd = 0.0;

  // Ordered as (t, d, d', d'', s, s', s'').
  std::array<double, 7> as_vector() const { return {t, d, d_d, d_dd, s, s_d, s_dd}; }
};

}  // namespace riskplan
