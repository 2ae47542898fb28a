#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "riskplan/riskfield.hpp"
#include "riskplan/sim.hpp"
#include "riskplan/uncmap.hpp"

namespace riskplan {

using Rgb = std::array<std::uint8_t, 3>;

/// RGB raster with world-to-pixel mapping; y grows upwards in world space.
class Canvas {
 public:
  Canvas(double world_w, double world_h, int max_px = 800) : world_w_(world_w), world_h_(world_h) {
    if (!(world_w > 0.0 && world_h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "canvas: empty extent");
    scale_ = max_px / std::max(world_w, world_h);
    w_ = std::max(1, static_cast<int>(std::lround(world_w * scale_)));
    h_ = std::max(1, static_cast<int>(std::lround(world_h * scale_)));
    px_.assign(static_cast<std::size_t>(w_) * h_, Rgb{255, 255, 255});
  }

  int width() const { return w_; }
  int height() const { return h_; }

  // Pixel center -> world point.
  Vec2 world_of(int px, int py) const { return {(px + 0.5) / scale_, (h_ - py - 0.5) / scale_}; }

  void set(int px, int py, Rgb c) {
    if (px >= 0 && py >= 0 && px < w_ && py < h_) px_[static_cast<std::size_t>(py) * w_ + px] = c;
  }

  void line(const Vec2& a, const Vec2& b, Rgb c) {
    int x0 = to_px(a.x), y0 = to_py(a.y);
    const int x1 = to_px(b.x), y1 = to_py(b.y);
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (int guard = 0; guard < 4 * (w_ + h_) + 4; ++guard) {
      set(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void polyline(const std::vector<Vec2>& pts, Rgb c) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) line(pts[i], pts[i + 1], c);
  }

  void disc(const Vec2& center, double radius_m, Rgb c) {
    const double r = std::max(radius_m * scale_, 1.5);
    const int cx = to_px(center.x), cy = to_py(center.y);
    const int ri = static_cast<int>(std::ceil(r));
    for (int y = -ri; y <= ri; ++y)
      for (int x = -ri; x <= ri; ++x)
        if (x * x + y * y <= r * r) set(cx + x, cy + y, c);
  }

  /// Grayscale background: darker means a larger value.
  template <typename Field>
  void shade(Field&& field, double vmax) {
    for (int py = 0; py < h_; ++py) {
      for (int px = 0; px < w_; ++px) {
        const double v = vmax > 0.0 ? std::sqrt(std::clamp(field(world_of(px, py)) / vmax, 0.0, 1.0)) : 0.0;
        const auto g = static_cast<std::uint8_t>(std::lround(255.0 - 200.0 * v));
        set(px, py, {g, g, g});
      }
    }
  }

  std::string ppm() const {
    std::string out = "P6\n" + std::to_string(w_) + " " + std::to_string(h_) + "\n255\n";
    out.reserve(out.size() + px_.size() * 3);
    for (const auto& p : px_) out.append(reinterpret_cast<const char*>(p.data()), 3);
    return out;
  }

 private:
  int to_px(double x) const { return static_cast<int>(std::floor(x * scale_)); }
  int to_py(double y) const { return h_ - 1 - static_cast<int>(std::floor(y * scale_)); }

  double world_w_, world_h_, scale_;
  int w_, h_;
  std::vector<Rgb> px_;
};

inline constexpr Rgb kReferenceColor{40, 90, 200};
inline constexpr Rgb kCandidateColor{190, 200, 230};
inline constexpr Rgb kWinnerColor{20, 160, 60};
inline constexpr Rgb kVehicleColor{220, 30, 30};
inline constexpr Rgb kObstacleColor{240, 140, 20};

inline std::vector<Vec2> reference_points(const ReferencePath& ref) {
  std::vector<Vec2> pts;
  for (std::size_t i = 0; i < ref.size(); ++i) pts.push_back(ref.point(i));
  return pts;
}

inline std::vector<Vec2> trajectory_points(const CandidateTrajectory& t) {
  std::vector<Vec2> pts;
  for (const auto& p : t.points) pts.push_back({p.x, p.y});
  return pts;
}

/// One frame per tick: static plus obstacle field, reference, candidates,
/// winner, vehicle and obstacles.
inline std::string render_frame(const Scenario& sc, const ReferencePath& ref, const TickRecord& tick,
                                const std::vector<CandidateTrajectory>* candidates, const FieldWeights& fw,
                                int max_px = 600) {
  Canvas cv(sc.scene.width, sc.scene.height, max_px);
  const auto obstacles = obstacles_at(sc, tick.t);
  auto field = [&](const Vec2& p) {
    return total_static_field(sc.scene, p) + total_obstacle_field(obstacles, fw, p);
  };
  double vmax = 0.0;
  for (const auto& s : sc.scene.static_sources) vmax = std::max(vmax, s.k_s);
  for (const auto& o : obstacles) vmax = std::max(vmax, fw.w_p * o.K + fw.w_d * obstacle_dynamic_cap(o));
  cv.shade(field, vmax);
  cv.polyline(reference_points(ref), kReferenceColor);
  if (candidates)
    for (const auto& c : *candidates) cv.polyline(trajectory_points(c), kCandidateColor);
  if (tick.winner) cv.polyline(trajectory_points(*tick.winner), kWinnerColor);
  for (const auto& o : obstacles) cv.disc(o.position, o.r_min, kObstacleColor);
  cv.disc({tick.vehicle.x, tick.vehicle.y}, 1.0, kVehicleColor);
  cv.disc(sc.goal, 1.0, kWinnerColor);
  return cv.ppm();
}

// ---- SVG ----------------------------------------------------------------

inline std::string svg_color(Rgb c) {
  return "rgb(" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]) + ")";
}

inline std::string svg_polyline(const std::vector<Vec2>& pts, double h, Rgb c, double width,
                                const std::string& extra = "") {
  std::string s = "<polyline fill=\"none\" stroke=\"" + svg_color(c) + "\" stroke-width=\"" + fmt_fixed(width, 2) +
                  "\"" + extra + " points=\"";
  for (const auto& p : pts) s += fmt_fixed(p.x, 2) + "," + fmt_fixed(h - p.y, 2) + " ";
  return s + "\"/>\n";
}

/// Overview in world units: shaded field, reference, executed path and
/// obstacle tracks.
inline std::string render_overview_svg(const Scenario& sc, const ReferencePath& ref, const EpisodeLog& log,
                                       int shade_cells = 60) {
  const double w = sc.scene.width, h = sc.scene.height;
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt_double(w) + " " + fmt_double(h) +
                  "\" width=\"900\" height=\"" + std::to_string(static_cast<int>(900.0 * h / w)) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Static field plus the obstacles at their initial positions.
  const FieldWeights& fw = sc.scene.field_weights;
  double vmax = 0.0;
  for (const auto& src : sc.scene.static_sources) vmax = std::max(vmax, src.k_s);
  for (const auto& o : sc.scene.obstacles) vmax = std::max(vmax, fw.w_p * o.K + fw.w_d * obstacle_dynamic_cap(o));
  if (vmax > 0.0) {
    const double cell = std::max(w, h) / shade_cells;
    for (double y = 0.0; y < h; y += cell) {
      for (double x = 0.0; x < w; x += cell) {
        const Vec2 q{x + cell / 2, y + cell / 2};
        const double v =
            std::sqrt((total_static_field(sc.scene, q) + total_obstacle_field(sc.scene.obstacles, fw, q)) / vmax);
        if (v <= 0.0) continue;
        s += "<rect x=\"" + fmt_fixed(x, 2) + "\" y=\"" + fmt_fixed(h - y - cell, 2) + "\" width=\"" +
             fmt_fixed(cell, 2) + "\" height=\"" + fmt_fixed(cell, 2) + "\" fill=\"black\" fill-opacity=\"" +
             fmt_fixed(0.6 * std::min(v, 1.0), 3) + "\"/>\n";
      }
    }
  }
  const double stroke = std::max(w, h) / 400.0;
  s += svg_polyline(reference_points(ref), h, kReferenceColor, stroke, " stroke-dasharray=\"4,3\"");
  std::vector<Vec2> exec;
  for (const auto& p : log.executed) exec.push_back({p.x, p.y});
  s += svg_polyline(exec, h, kWinnerColor, 2 * stroke);
  for (std::size_t i = 0; i < sc.scene.obstacles.size(); ++i) {
    std::vector<Vec2> track;
    for (const auto& t : log.ticks) track.push_back(t.obstacles[i]);
    s += svg_polyline(track, h, kObstacleColor, stroke);
    const Vec2 last = track.empty() ? sc.scene.obstacles[i].position : track.back();
    s += "<circle cx=\"" + fmt_fixed(last.x, 2) + "\" cy=\"" + fmt_fixed(h - last.y, 2) + "\" r=\"" +
         fmt_double(sc.scene.obstacles[i].r_min) + "\" fill=\"" + svg_color(kObstacleColor) + "\"/>\n";
  }
  for (const auto& [p, c] : {std::pair{sc.start, kVehicleColor}, std::pair{sc.goal, kWinnerColor}}) {
    s += "<circle cx=\"" + fmt_fixed(p.x, 2) + "\" cy=\"" + fmt_fixed(h - p.y, 2) + "\" r=\"" + fmt_fixed(3 * stroke, 2) +
         "\" fill=\"" + svg_color(c) + "\"/>\n";
  }
  s += "<text x=\"" + fmt_fixed(2 * stroke, 2) + "\" y=\"" + fmt_fixed(8 * stroke, 2) + "\" font-size=\"" +
       fmt_fixed(6 * stroke, 2) + "\">" + (log.scenario.empty() ? std::string("episode") : log.scenario) + ": " +
       to_string(log.termination) + ", max e " + fmt_fixed(log.max_field, 3) + "</text>\n";
  return s + "</svg>\n";
}

/// Global-planning overview: uncertainty map plus one polyline per path.
inline std::string render_paths_svg(const UncertaintyMap& map, const std::vector<std::vector<Vec2>>& paths,
                                    const std::vector<Rgb>& colors) {
  const double w = map.extent_x(), h = map.extent_y();
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt_double(w) + " " + fmt_double(h) +
                  "\" width=\"800\" height=\"" + std::to_string(static_cast<int>(800.0 * h / w)) + "\">\n";
  const int step = std::max(1, std::max(map.width, map.height) / 100);
  for (int r = 0; r < map.height; r += step) {
    for (int c = 0; c < map.width; c += step) {
      double u = 0.0;
      for (int rr = r; rr < std::min(map.height, r + step); ++rr)
        for (int cc = c; cc < std::min(map.width, c + step); ++cc) u = std::max(u, map.at(cc, rr));
      const double cell = map.cell_size * step;
      s += "<rect x=\"" + fmt_fixed(map.origin.x + c * map.cell_size, 2) + "\" y=\"" +
           fmt_fixed(h - (map.origin.y + r * map.cell_size) - cell, 2) + "\" width=\"" + fmt_fixed(cell, 2) +
           "\" height=\"" + fmt_fixed(cell, 2) + "\" fill=\"black\" fill-opacity=\"" + fmt_fixed(0.8 * u, 3) +
           "\"/>\n";
    }
  }
  const double stroke = std::max(w, h) / 300.0;
  for (std::size_t i = 0; i < paths.size(); ++i)
    s += svg_polyline(paths[i], h, colors[i % colors.size()], stroke);
  return s + "</svg>\n";
}

}  // namespace riskplan
