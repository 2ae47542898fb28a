#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "riskplan/common.hpp"
#include "riskplan/parallel.hpp"

namespace riskplan {

struct Disc {
  double radius = 0.0;
};

// Axis-aligned, centered on the source center.
struct Rect {
  double width = 0.0;
  double height = 0.0;
};

using SourceGeometry = std::variant<Disc, Rect>;

/// Static risk source (non-accessible area, off-road terrain, risk center).
/// The field saturates at k_s inside r_min and vanishes beyond r_max, with
/// r measured from the source boundary.
struct StaticRiskSource {
  Vec2 center;
  SourceGeometry geometry = Disc{};
  double k_s = 1.0;
  double r_min = 1.0;
  double r_max = 2.0;
  double n_order = 4.0;

  void validate() const {
    if (!(k_s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "static source: k_S must be > 0");
    if (!(r_min > 0.0)) throw Error(ErrorCode::kInvalidArgument, "static source: r_min must be > 0");
    if (!(r_max > r_min)) throw Error(ErrorCode::kInvalidArgument, "static source: r_max must exceed r_min");
    if (!(n_order > 2.0)) throw Error(ErrorCode::kInvalidArgument, "static source: n_order must be > 2");
    if (const auto* d = std::get_if<Disc>(&geometry); d && !(d->radius >= 0.0))
      throw Error(ErrorCode::kInvalidArgument, "static source: disc radius must be >= 0");
    if (const auto* r = std::get_if<Rect>(&geometry); r && !(r->width >= 0.0 && r->height >= 0.0))
      throw Error(ErrorCode::kInvalidArgument, "static source: rectangle extents must be >= 0");
  }
};

/// Obstacle or entity, possibly moving. K is the intrinsic danger
/// coefficient, k1/k2 the distance and velocity coefficients of the dynamic
/// component, v_cap the speed at which the dynamic component saturates.
struct ObstacleState {
  Vec2 position;
  Vec2 velocity;
  double K = 1.0;
  double r_min = 1.0;
  double r_max = 10.0;
  double k1 = 1.0;
  double k2 = 0.05;
  double v_cap = 30.0;

  void validate() const {
    if (!(K > 0.0)) throw Error(ErrorCode::kInvalidArgument, "obstacle: K must be > 0");
    if (!(r_min > 0.0)) throw Error(ErrorCode::kInvalidArgument, "obstacle: r_min must be > 0");
    if (!(r_max > r_min)) throw Error(ErrorCode::kInvalidArgument, "obstacle: r_max must exceed r_min");
    if (!(k1 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "obstacle: k1 must be > 0");
    if (!(k2 >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "obstacle: k2 must be >= 0");
    if (!(v_cap >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "obstacle: v_cap must be >= 0");
  }
};

struct FieldWeights {
  double w_p = 0.5;
  double w_d = 0.5;

  void validate() const {
    if (!(w_p >= 0.0 && w_d >= 0.0 && w_p + w_d > 0.0))
      throw Error(ErrorCode::kInvalidArgument, "field weights: need w_P, w_D >= 0 and w_P + w_D > 0");
  }
};

/// Declarative world: rectangle [0, width] x [0, height] plus risk content.
struct RiskScene {
  double width = 0.0;
  double height = 0.0;
  std::vector<StaticRiskSource> static_sources;
  std::vector<ObstacleState> obstacles;
  FieldWeights field_weights;

  void validate() const {
    if (!(width > 0.0 && height > 0.0))
      throw Error(ErrorCode::kInvalidArgument, "scene: bounds must be positive");
    for (const auto& s : static_sources) s.validate();
    for (const auto& o : obstacles) o.validate();
    field_weights.validate();
  }
};

/// Row-major raster; row 0 is the lowest y band.
struct FieldRaster {
  Vec2 origin;
  double cell_size = 1.0;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  double at(std::size_t col, std::size_t row) const { return values[row * width + col]; }
  Vec2 cell_center(std::size_t col, std::size_t row) const {
    return {origin.x + (static_cast<double>(col) + 0.5) * cell_size,
            origin.y + (static_cast<double>(row) + 0.5) * cell_size};
  }
  double max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
  }
};

// Distance from p to the source boundary; 0 inside the source.
inline double boundary_distance(const StaticRiskSource& src, const Vec2& p) {
  if (const auto* disc = std::get_if<Disc>(&src.geometry)) {
    return std::max(0.0, distance(p, src.center) - disc->radius);
  }
  const auto& rect = std::get<Rect>(src.geometry);
  const double dx = std::max(0.0, std::abs(p.x - src.center.x) - 0.5 * rect.width);
  const double dy = std::max(0.0, std::abs(p.y - src.center.y) - 0.5 * rect.height);
  return std::hypot(dx, dy);
}

// Static-source field as a function of boundary distance r.
inline double static_potential_at_distance(const StaticRiskSource& src, double r) {
  if (r > src.r_max) return 0.0;
  if (r < src.r_min) return src.k_s;
  const double e = src.n_order - 2.0;
  const double num = std::pow(r, e) - std::pow(src.r_max, e);
  const double den = std::pow(src.r_min, e) - std::pow(src.r_max, e);
  return src.k_s * num / den;
}

inline double static_potential(const StaticRiskSource& src, const Vec2& p) {
  return static_potential_at_distance(src, boundary_distance(src, p));
}

/// Superposition of all static sources whose influence range contains p.
inline double total_static_field(std::span<const StaticRiskSource> sources, const Vec2& p) {
  double sum = 0.0;
  for (const auto& src : sources) {
    const double r = boundary_distance(src, p);
    if (r <= src.r_max) sum += static_potential_at_distance(src, r);
  }
  return sum;
}

inline double total_static_field(const RiskScene& scene, const Vec2& p) {
  return total_static_field(std::span<const StaticRiskSource>(scene.static_sources), p);
}

inline double obstacle_static_at_distance(const ObstacleState& obs, double r) {
  if (r > obs.r_max) return 0.0;
  if (r < obs.r_min) return obs.K;  // E_Pmax = K keeps E_P continuous at r_min
  const double rmin2 = obs.r_min * obs.r_min;
  const double rmax2 = obs.r_max * obs.r_max;
  const double r_p = rmin2 * rmax2 / (rmax2 - rmin2);
  return obs.K * r_p * (1.0 / (r * r) - 1.0 / rmax2);
}

inline double obstacle_static_potential(const ObstacleState& obs, const Vec2& p) {
  return obstacle_static_at_distance(obs, distance(p, obs.position));
}

inline double obstacle_dynamic_cap(const ObstacleState& obs) {
  return obs.K * std::exp(obs.k2 * obs.v_cap) / std::pow(obs.r_min, obs.k1);
}

/// Velocity-dependent component; grows ahead of a moving obstacle and
/// shrinks behind it. Saturates at obstacle_dynamic_cap().
inline double obstacle_dynamic_potential(const ObstacleState& obs, const Vec2& p) {
  const Vec2 rel = p - obs.position;
  const double r = rel.norm();
  if (r == 0.0) throw Error(ErrorCode::kDegenerateDistance, "obstacle dynamic field: query point coincides with obstacle");
  const double v = obs.velocity.norm();
  double cos_theta = 0.0;
  if (v > 0.0) {
    const double theta = std::atan2(obs.velocity.cross(rel), obs.velocity.dot(rel));
    cos_theta = std::cos(theta);
  }
  const double value = obs.K / std::pow(r, obs.k1) * std::exp(obs.k2 * v * cos_theta);
  return std::min(obstacle_dynamic_cap(obs), value);
}

inline double obstacle_potential(const ObstacleState& obs, const FieldWeights& w, const Vec2& p) {
  return w.w_p * obstacle_static_potential(obs, p) + w.w_d * obstacle_dynamic_potential(obs, p);
}

/// Total obstacle field used by constraint checking. A query exactly on an
/// obstacle center takes the saturated value of both components.
inline double total_obstacle_field(std::span<const ObstacleState> obstacles, const FieldWeights& w,
                                   const Vec2& p) {
  double sum = 0.0;
  for (const auto& obs : obstacles) {
    if (p == obs.position) {
      sum += w.w_p * obs.K + w.w_d * obstacle_dynamic_cap(obs);
    } else {
      sum += obstacle_potential(obs, w, p);
    }
  }
  return sum;
}

/// Samples `field` at every cell center. Rows are evaluated independently.
template <typename Field>
FieldRaster rasterize(Field&& field, Vec2 origin, double cell_size, std::size_t width, std::size_t height,
                      unsigned threads = 1) {
  if (!(cell_size > 0.0)) throw Error(ErrorCode::kInvalidArgument, "rasterize: cell_size must be > 0");
  constexpr std::size_t kMaxCells = std::size_t{1} << 31;
  if (width != 0 && height > kMaxCells / width)
    throw Error(ErrorCode::kDimensionOverflow, "rasterize: width*height exceeds 2^31 cells");
  FieldRaster raster{origin, cell_size, width, height, std::vector<double>(width * height, 0.0)};
  parallel_for(
      height,
      [&](std::size_t row) {
        for (std::size_t col = 0; col < width; ++col) {
          raster.values[row * width + col] = field(raster.cell_center(col, row));
        }
      },
      threads);
  return raster;
}

inline FieldRaster rasterize_static(const RiskScene& scene, double cell_size, unsigned threads = 1) {
  const auto w = static_cast<std::size_t>(std::ceil(scene.width / cell_size - 1e-9));
  const auto h = static_cast<std::size_t>(std::ceil(scene.height / cell_size - 1e-9));
  return rasterize([&](const Vec2& p) { return total_static_field(scene, p); }, Vec2{0.0, 0.0}, cell_size, w,
                   h, threads);
}

}  // namespace riskplan
