#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace riskplan {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr bool operator==(const Vec2&) const = default;

  constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  constexpr double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kTwoPi = 2.0 * M_PI;
  a = std::fmod(a + M_PI, kTwoPi);
  if (a <= 0.0) a += kTwoPi;
  return a - M_PI;
}

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateDistance,
  kDimensionOverflow,
  kDegenerateScene,
  kInvalidStrides,
  kBlockedNode,
  kOutOfBounds,
  kUnreachable,
  kSolverNotConverged,
  kOutOfDomain,
  kAmbiguousProjection,
  kNoFeasibleTrajectory,
  kIo,
  kParse,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kDegenerateDistance: return "degenerate_distance";
    case ErrorCode::kDimensionOverflow: return "dimension_overflow";
    case ErrorCode::kDegenerateScene: return "degenerate_scene";
    case ErrorCode::kInvalidStrides: return "invalid_strides";
    case ErrorCode::kBlockedNode: return "blocked_node";
    case ErrorCode::kOutOfBounds: return "out_of_bounds";
    case ErrorCode::kUnreachable: return "unreachable";
    case ErrorCode::kSolverNotConverged: return "solver_not_converged";
    case ErrorCode::kOutOfDomain: return "out_of_domain";
    case ErrorCode::kAmbiguousProjection: return "ambiguous_projection";
    case ErrorCode::kNoFeasibleTrajectory: return "no_feasible_trajectory";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kParse: return "parse";
  }
  return "unknown";
}

/// Domain error carrying a machine-readable code. All library failures are
/// reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Shortest round-trip representation for text output.
inline std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string fmt_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace riskplan
