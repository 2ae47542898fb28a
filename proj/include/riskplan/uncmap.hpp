#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "riskplan/common.hpp"
#include "riskplan/riskfield.hpp"

namespace riskplan {

inline constexpr double kBlockedSentinel = 1.0;
inline constexpr double kDefaultUncertaintyCap = 0.95;

/// Normalized risk raster. Traversable cells hold u in [0, 1); blocked cells
/// hold kBlockedSentinel and are never expanded by search.
struct UncertaintyMap {
  Vec2 origin;
  double cell_size = 1.0;
  int width = 0;
  int height = 0;
  std::vector<double> u;
  std::vector<std::uint8_t> blocked;

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col);
  }
  bool in_bounds(int col, int row) const { return col >= 0 && row >= 0 && col < width && row < height; }
  bool is_blocked(int col, int row) const { return blocked[index(col, row)] != 0; }
  double at(int col, int row) const { return u[index(col, row)]; }

  Vec2 cell_center(int col, int row) const {
    return {origin.x + (col + 0.5) * cell_size, origin.y + (row + 0.5) * cell_size};
  }
  // Cell containing p; may be out of bounds.
  std::pair<int, int> cell_of(const Vec2& p) const {
    return {static_cast<int>(std::floor((p.x - origin.x) / cell_size)),
            static_cast<int>(std::floor((p.y - origin.y) / cell_size))};
  }
  double extent_x() const { return width * cell_size; }
  double extent_y() const { return height * cell_size; }

  void validate() const {
    if (width <= 0 || height <= 0) throw Error(ErrorCode::kInvalidArgument, "uncertainty map: empty dimensions");
    if (!(cell_size > 0.0)) throw Error(ErrorCode::kInvalidArgument, "uncertainty map: cell_size must be > 0");
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (u.size() != n || blocked.size() != n)
      throw Error(ErrorCode::kInvalidArgument, "uncertainty map: value count does not match dimensions");
    for (std::size_t i = 0; i < n; ++i) {
      if (blocked[i]) {
        if (u[i] != kBlockedSentinel)
          throw Error(ErrorCode::kInvalidArgument, "uncertainty map: blocked cell without sentinel value");
      } else if (!(u[i] >= 0.0 && u[i] < 1.0)) {
        throw Error(ErrorCode::kInvalidArgument, "uncertainty map: traversable value outside [0, 1)");
      }
    }
  }
};

/// Maps field values linearly to [0, u_cap]; cells at or above
/// block_threshold become non-accessible.
inline UncertaintyMap normalize(const FieldRaster& field, double block_threshold,
                                double u_cap = kDefaultUncertaintyCap) {
  if (!(block_threshold > 0.0)) throw Error(ErrorCode::kInvalidArgument, "normalize: block_threshold must be > 0");
  if (!(u_cap >= 0.0 && u_cap < 1.0)) throw Error(ErrorCode::kInvalidArgument, "normalize: u_cap must be in [0, 1)");
  UncertaintyMap map;
  map.origin = field.origin;
  map.cell_size = field.cell_size;
  map.width = static_cast<int>(field.width);
  map.height = static_cast<int>(field.height);
  map.u.resize(field.values.size());
  map.blocked.resize(field.values.size());
  std::size_t n_blocked = 0;
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const double v = field.values[i];
    if (v >= block_threshold) {
      map.blocked[i] = 1;
      map.u[i] = kBlockedSentinel;
      ++n_blocked;
    } else {
      map.blocked[i] = 0;
      map.u[i] = std::max(0.0, v) / block_threshold * u_cap;
    }
  }
  if (!field.values.empty() && n_blocked == field.values.size())
    throw Error(ErrorCode::kDegenerateScene, "normalize: every cell is non-accessible");
  return map;
}

/// Mixed max/mean pooling over factor x factor regions. Edge regions that
/// overhang the fine map use only the cells that exist.
inline UncertaintyMap mixed_pool(const UncertaintyMap& fine, int factor, double lambda) {
  if (factor < 2) throw Error(ErrorCode::kInvalidArgument, "mixed_pool: factor must be >= 2");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "mixed_pool: lambda must be in [0, 1]");
  UncertaintyMap out;
  out.origin = fine.origin;
  out.cell_size = fine.cell_size * factor;
  out.width = (fine.width + factor - 1) / factor;
  out.height = (fine.height + factor - 1) / factor;
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height;
  out.u.assign(n, 0.0);
  out.blocked.assign(n, 0);
  for (int row = 0; row < out.height; ++row) {
    for (int col = 0; col < out.width; ++col) {
      const int c0 = col * factor, r0 = row * factor;
      const int c1 = std::min(fine.width, c0 + factor), r1 = std::min(fine.height, r0 + factor);
      bool any_blocked = false;
      double vmax = 0.0, sum = 0.0;
      int count = 0;
      for (int r = r0; r < r1; ++r) {
        for (int c = c0; c < c1; ++c) {
          if (fine.is_blocked(c, r)) {
            any_blocked = true;
            continue;
          }
          const double v = fine.at(c, r);
          vmax = std::max(vmax, v);
          sum += v;
          ++count;
        }
      }
      const std::size_t k = out.index(col, row);
      if (any_blocked) {
        out.blocked[k] = 1;
        out.u[k] = kBlockedSentinel;
      } else {
        out.u[k] = lambda * vmax + (1.0 - lambda) * (sum / count);
      }
    }
  }
  return out;
}

/// Resolution pyramid, finest layer first. Each stride is an integer
/// multiple of the previous one.
struct MapPyramid {
  std::vector<UncertaintyMap> layers;
  std::vector<double> strides;
  double lambda = 0.5;

  const UncertaintyMap& fine() const { return layers.front(); }
  const UncertaintyMap& coarse() const { return layers.back(); }
  // Only meaningful for three-layer pyramids; otherwise the fine layer.
  const UncertaintyMap& middle() const { return layers.size() >= 3 ? layers[layers.size() - 2] : layers.front(); }
  std::size_t depth() const { return layers.size(); }
};

// Returns the integer pooling factors between consecutive strides.
inline std::vector<int> pooling_factors(const std::vector<double>& strides) {
  if (strides.size() < 2) throw Error(ErrorCode::kInvalidStrides, "pyramid: need at least two strides");
  std::vector<int> factors;
  for (std::size_t i = 0; i + 1 < strides.size(); ++i) {
    if (!(strides[i] > 0.0) || !(strides[i + 1] > strides[i]))
      throw Error(ErrorCode::kInvalidStrides, "pyramid: strides must be positive and strictly increasing");
    const double ratio = strides[i + 1] / strides[i];
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * ratio)
      throw Error(ErrorCode::kInvalidStrides, "pyramid: each stride must be an integer multiple of the finer one");
    factors.push_back(static_cast<int>(rounded));
  }
  return factors;
}

inline MapPyramid build_pyramid_from_map(UncertaintyMap fine, const std::vector<double>& strides, double lambda) {
  const auto factors = pooling_factors(strides);
  if (std::abs(fine.cell_size - strides.front()) > 1e-9 * strides.front())
    throw Error(ErrorCode::kInvalidStrides, "pyramid: fine map cell size must equal the finest stride");
  MapPyramid pyr;
  pyr.strides = strides;
  pyr.lambda = lambda;
  pyr.layers.push_back(std::move(fine));
  for (int f : factors) pyr.layers.push_back(mixed_pool(pyr.layers.back(), f, lambda));
  return pyr;
}

inline MapPyramid build_pyramid(const FieldRaster& field, const std::vector<double>& strides, double lambda,
                                double block_threshold, double u_cap = kDefaultUncertaintyCap) {
  return build_pyramid_from_map(normalize(field, block_threshold, u_cap), strides, lambda);
}

/// Default block threshold: saturation level of the most dangerous source.
inline double default_block_threshold(const RiskScene& scene) {
  double k = 0.0;
  for (const auto& s : scene.static_sources) k = std::max(k, s.k_s);
  return k > 0.0 ? k : 1.0;
}

// Portable uniform [0, 1) from a 64-bit engine.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Parameters of the seeded random uncertainty-map generator: a sum of
/// Gaussian bumps rescaled to [0, u_cap]. Cells whose rescaled level reaches
/// block_level (fraction of the range) become non-accessible.
struct RandomMapParams {
  int width = 200;
  int height = 200;
  double cell_size = 10.0;
  std::uint64_t seed = 1;
  int bumps = 160;
  double sigma_min = 30.0;
  double sigma_max = 120.0;
  double amplitude_min = 0.2;
  double amplitude_max = 1.0;
  double u_cap = kDefaultUncertaintyCap;
  double block_level = 1.1;  // > 1 disables blocking

  std::string describe() const {
    return "width=" + std::to_string(width) + " height=" + std::to_string(height) +
           " cell_size=" + fmt_double(cell_size) + " seed=" + std::to_string(seed) +
           " bumps=" + std::to_string(bumps) + " sigma=[" + fmt_double(sigma_min) + "," + fmt_double(sigma_max) +
           "] amplitude=[" + fmt_double(amplitude_min) + "," + fmt_double(amplitude_max) +
           "] u_cap=" + fmt_double(u_cap) + " block_level=" + fmt_double(block_level);
  }
};

inline UncertaintyMap random_uncertainty_map(const RandomMapParams& p) {
  if (p.width <= 0 || p.height <= 0 || !(p.cell_size > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "random map: invalid dimensions");
  std::mt19937_64 rng(p.seed);
  struct Bump {
    Vec2 c;
    double inv_two_sigma2;
    double a;
  };
  std::vector<Bump> bumps;
  const double ex = p.width * p.cell_size, ey = p.height * p.cell_size;
  for (int i = 0; i < p.bumps; ++i) {
    Bump b;
    b.c = {uniform(rng, 0.0, ex), uniform(rng, 0.0, ey)};
    const double sigma = uniform(rng, p.sigma_min, p.sigma_max);
    b.inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
    b.a = uniform(rng, p.amplitude_min, p.amplitude_max);
    bumps.push_back(b);
  }
  UncertaintyMap map;
  map.cell_size = p.cell_size;
  map.width = p.width;
  map.height = p.height;
  const std::size_t n = static_cast<std::size_t>(p.width) * p.height;
  std::vector<double> raw(n, 0.0);
  for (int row = 0; row < p.height; ++row) {
    for (int col = 0; col < p.width; ++col) {
      const Vec2 q = map.cell_center(col, row);
      double s = 0.0;
      for (const auto& b : bumps) {
        const Vec2 d = q - b.c;
        s += b.a * std::exp(-d.dot(d) * b.inv_two_sigma2);
      }
      raw[map.index(col, row)] = s;
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
  const double lo = *lo_it, span = std::max(*hi_it - *lo_it, 1e-300);
  map.u.resize(n);
  map.blocked.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double level = (raw[i] - lo) / span;
    if (level >= p.block_level) {
      map.blocked[i] = 1;
      map.u[i] = kBlockedSentinel;
    } else {
      map.blocked[i] = 0;
      map.u[i] = std::min(level, 1.0) * p.u_cap;
    }
  }
  return map;
}

}  // namespace riskplan
