#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "riskplan/common.hpp"
#include "riskplan/parallel.hpp"
#include "riskplan/uncmap.hpp"

namespace riskplan {

struct GridNode {
  int col = 0;
  int row = 0;
  constexpr bool operator==(const GridNode&) const = default;
};

enum class EdgeCostModel {
  kDistance,     // path length only
  kUncertainty,  // length scaled by 1 / (1 - U(target))
};

/// Inclusive cell rectangle limiting a search.
struct CellWindow {
  int col0 = 0;
  int row0 = 0;
  int col1 = 0;
  int row1 = 0;

  bool contains(int c, int r) const { return c >= col0 && c <= col1 && r >= row0 && r <= row1; }
  int width() const { return col1 - col0 + 1; }
  int height() const { return row1 - row0 + 1; }

  static CellWindow full(const UncertaintyMap& m) { return {0, 0, m.width - 1, m.height - 1}; }
};

struct GlobalPath {
  std::vector<Vec2> nodes;
  std::vector<int> layer;  // pyramid layer each node was produced on (0 = finest)
};

struct SearchStats {
  std::size_t expanded = 0;
  double wall_time_s = 0.0;
  double length_m = 0.0;
  double mean_uncertainty = 0.0;
  bool fallback = false;  // hierarchical search fell back to single-layer
  std::size_t segments = 0;
};

struct PlanResult {
  GlobalPath path;
  SearchStats stats;
};

inline bool is_adjacent(const GridNode& a, const GridNode& b) {
  const int dc = std::abs(a.col - b.col), dr = std::abs(a.row - b.row);
  return dc <= 1 && dr <= 1 && (dc + dr) > 0;
}

inline double uncertainty_factor(double u) { return 1.0 / (1.0 - u); }

/// Cost of moving between 8-neighbors: world step length, optionally scaled
/// by the uncertainty factor of the target cell.
inline double edge_cost(const GridNode& from, const GridNode& to, const UncertaintyMap& map,
                        EdgeCostModel model = EdgeCostModel::kUncertainty) {
  if (!map.in_bounds(from.col, from.row) || !map.in_bounds(to.col, to.row))
    throw Error(ErrorCode::kOutOfBounds, "edge_cost: node outside map");
  if (!is_adjacent(from, to)) throw Error(ErrorCode::kInvalidArgument, "edge_cost: nodes are not 8-neighbors");
  if (map.is_blocked(to.col, to.row)) throw Error(ErrorCode::kBlockedNode, "edge_cost: target node is blocked");
  const bool diagonal = from.col != to.col && from.row != to.row;
  const double d = diagonal ? map.cell_size * std::sqrt(2.0) : map.cell_size;
  return model == EdgeCostModel::kUncertainty ? d * uncertainty_factor(map.at(to.col, to.row)) : d;
}

namespace detail {

struct OpenEntry {
  double f;
  double h;
  std::uint64_t key;  // row-major node index on the full map
  int local;
};

// Min-heap order: lower f, then lower h, then lower row-major index.
struct OpenAfter {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.key > b.key;
  }
};

inline constexpr int kNeighborDc[8] = {1, -1, 0, 0, 1, 1, -1, -1};
inline constexpr int kNeighborDr[8] = {0, 0, 1, -1, 1, -1, 1, -1};

}  // namespace detail

/// Diagonal moves may not cut the corner of a blocked cell.
inline bool step_allowed(const UncertaintyMap& map, const CellWindow& win, int c, int r, int dc, int dr) {
  const int nc = c + dc, nr = r + dr;
  if (!win.contains(nc, nr) || map.is_blocked(nc, nr)) return false;
  if (dc != 0 && dr != 0) {
    if (map.is_blocked(c + dc, r) || map.is_blocked(c, r + dr)) return false;
  }
  return true;
}

/// Single-layer A* with a Euclidean heuristic. Returns the node sequence
/// from start to goal, or an empty vector when the goal is unreachable
/// inside the window.
inline std::vector<GridNode> astar_search(const GridNode& start, const GridNode& goal, const UncertaintyMap& map,
                                          EdgeCostModel model = EdgeCostModel::kUncertainty,
                                          std::optional<CellWindow> window = std::nullopt,
                                          std::size_t* expanded = nullptr) {
  CellWindow win = window.value_or(CellWindow::full(map));
  win.col0 = std::max(win.col0, 0);
  win.row0 = std::max(win.row0, 0);
  win.col1 = std::min(win.col1, map.width - 1);
  win.row1 = std::min(win.row1, map.height - 1);
  if (!map.in_bounds(start.col, start.row) || !map.in_bounds(goal.col, goal.row))
    throw Error(ErrorCode::kOutOfBounds, "astar_search: start or goal outside map");
  if (map.is_blocked(start.col, start.row) || map.is_blocked(goal.col, goal.row))
    throw Error(ErrorCode::kBlockedNode, "astar_search: start or goal is blocked");
  if (!win.contains(start.col, start.row) || !win.contains(goal.col, goal.row))
    throw Error(ErrorCode::kOutOfBounds, "astar_search: start or goal outside search window");

  const int ww = win.width(), wh = win.height();
  const std::size_t n = static_cast<std::size_t>(ww) * wh;
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);
  auto local_of = [&](int c, int r) { return (r - win.row0) * ww + (c - win.col0); };
  const double diag = map.cell_size * std::sqrt(2.0);
  auto heuristic = [&](int c, int r) {
    return std::hypot(static_cast<double>(c - goal.col), static_cast<double>(r - goal.row)) * map.cell_size;
  };

  std::priority_queue<detail::OpenEntry, std::vector<detail::OpenEntry>, detail::OpenAfter> open;
  const int s_local = local_of(start.col, start.row);
  g[s_local] = 0.0;
  const double h0 = heuristic(start.col, start.row);
  open.push({h0, h0, map.index(start.col, start.row), s_local});
  const int goal_local = local_of(goal.col, goal.row);
  std::size_t n_expanded = 0;
  bool found = false;

  while (!open.empty()) {
    const detail::OpenEntry top = open.top();
    open.pop();
    if (closed[top.local]) continue;
    closed[top.local] = 1;
    ++n_expanded;
    if (top.local == goal_local) {
      found = true;
      break;
    }
    const int c = win.col0 + top.local % ww;
    const int r = win.row0 + top.local / ww;
    for (int k = 0; k < 8; ++k) {
      const int dc = detail::kNeighborDc[k], dr = detail::kNeighborDr[k];
      if (!step_allowed(map, win, c, r, dc, dr)) continue;
      const int nc = c + dc, nr = r + dr;
      const int nl = local_of(nc, nr);
      if (closed[nl]) continue;
      double step = (dc != 0 && dr != 0) ? diag : map.cell_size;
      if (model == EdgeCostModel::kUncertainty) step *= uncertainty_factor(map.at(nc, nr));
      const double cand = g[top.local] + step;
      if (cand < g[nl]) {
        g[nl] = cand;
        parent[nl] = top.local;
        const double h = heuristic(nc, nr);
        open.push({cand + h, h, map.index(nc, nr), nl});
      }
    }
  }
  if (expanded) *expanded += n_expanded;
  if (!found) return {};

  std::vector<GridNode> path;
  for (int cur = goal_local; cur != -1; cur = parent[cur]) {
    path.push_back({win.col0 + cur % ww, win.row0 + cur / ww});
  }
  std::reverse(path.begin(), path.end());
  return path;
}

/// Sum of edge costs along a node sequence.
inline double path_cost(const std::vector<GridNode>& nodes, const UncertaintyMap& map, EdgeCostModel model) {
  double c = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) c += edge_cost(nodes[i - 1], nodes[i], map, model);
  return c;
}

inline void require_inside(const UncertaintyMap& map, const Vec2& p, const char* what) {
  const auto [c, r] = map.cell_of(p);
  if (!map.in_bounds(c, r))
    throw Error(ErrorCode::kOutOfBounds, std::string(what) + " (" + fmt_double(p.x) + ", " + fmt_double(p.y) +
                                             ") lies outside the map");
}

/// Nearest unblocked cell to p within `radius_cells` (Chebyshev rings,
/// ties broken by Euclidean distance then row-major order).
inline std::optional<GridNode> snap_to_free(const UncertaintyMap& map, const Vec2& p, int radius_cells = 3) {
  auto [c0, r0] = map.cell_of(p);
  c0 = std::clamp(c0, 0, map.width - 1);
  r0 = std::clamp(r0, 0, map.height - 1);
  if (!map.is_blocked(c0, r0)) return GridNode{c0, r0};
  std::optional<GridNode> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (int r = r0 - radius_cells; r <= r0 + radius_cells; ++r) {
    for (int c = c0 - radius_cells; c <= c0 + radius_cells; ++c) {
      if (!map.in_bounds(c, r) || map.is_blocked(c, r)) continue;
      const double d = distance(map.cell_center(c, r), p);
      if (d < best_d) {
        best_d = d;
        best = GridNode{c, r};
      }
    }
  }
  return best;
}

inline double path_length(const GlobalPath& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.nodes.size(); ++i) len += distance(path.nodes[i - 1], path.nodes[i]);
  return len;
}

/// Mean uncertainty over the fine cells visited by the path.
inline double path_uncertainty(const GlobalPath& path, const UncertaintyMap& fine) {
  if (path.nodes.empty()) throw Error(ErrorCode::kInvalidArgument, "path_uncertainty: empty path");
  double sum = 0.0;
  for (const auto& p : path.nodes) {
    auto [c, r] = fine.cell_of(p);
    if (!fine.in_bounds(c, r)) throw Error(ErrorCode::kOutOfBounds, "path_uncertainty: node outside map");
    sum += fine.at(c, r);
  }
  return sum / static_cast<double>(path.nodes.size());
}

/// Checks adjacency at the map stride, endpoint cells and blockedness.
/// Returns an empty string when the path is valid.
inline std::string validate_path(const GlobalPath& path, const UncertaintyMap& map, const Vec2& start,
                                 const Vec2& goal) {
  if (path.nodes.empty()) return "empty path";
  std::vector<GridNode> cells;
  for (const auto& p : path.nodes) {
    auto [c, r] = map.cell_of(p);
    if (!map.in_bounds(c, r)) return "node outside map";
    if (map.is_blocked(c, r)) return "node on blocked cell";
    if (distance(map.cell_center(c, r), p) > 1e-6 * map.cell_size) return "node not at a cell center";
    cells.push_back({c, r});
  }
  for (std::size_t i = 1; i < cells.size(); ++i) {
    if (!is_adjacent(cells[i - 1], cells[i])) return "consecutive nodes are not 8-neighbors";
  }
  const auto s = snap_to_free(map, start), g = snap_to_free(map, goal);
  if (!s || !(cells.front() == *s)) return "first node is not the start cell";
  if (!g || !(cells.back() == *g)) return "last node is not the goal cell";
  return {};
}

namespace detail {

inline GlobalPath to_world(const std::vector<GridNode>& cells, const UncertaintyMap& map, int layer) {
  GlobalPath p;
  p.nodes.reserve(cells.size());
  for (const auto& c : cells) p.nodes.push_back(map.cell_center(c.col, c.row));
  p.layer.assign(cells.size(), layer);
  return p;
}

inline PlanResult single_layer_plan(const Vec2& start, const Vec2& goal, const UncertaintyMap& map,
                                    EdgeCostModel model) {
  const auto t0 = std::chrono::steady_clock::now();
  require_inside(map, start, "start");
  require_inside(map, goal, "goal");
  const auto s = snap_to_free(map, start), g = snap_to_free(map, goal);
  if (!s || !g) throw Error(ErrorCode::kBlockedNode, "global plan: start or goal has no free cell within 3 strides");
  PlanResult res;
  const auto cells = astar_search(*s, *g, map, model, std::nullopt, &res.stats.expanded);
  res.stats.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (cells.empty()) throw Error(ErrorCode::kUnreachable, "global plan: goal unreachable");
  res.path = to_world(cells, map, 0);
  res.stats.segments = 1;
  res.stats.length_m = path_length(res.path);
  res.stats.mean_uncertainty = path_uncertainty(res.path, map);
  return res;
}

}  // namespace detail

/// Baseline: fine-layer A* on path length alone.
inline PlanResult traditional_astar(const Vec2& start, const Vec2& goal, const UncertaintyMap& map) {
  return detail::single_layer_plan(start, goal, map, EdgeCostModel::kDistance);
}

/// Baseline: fine-layer A* with the uncertainty-weighted edge cost.
inline PlanResult improved_astar(const Vec2& start, const Vec2& goal, const UncertaintyMap& map) {
  return detail::single_layer_plan(start, goal, map, EdgeCostModel::kUncertainty);
}

struct Coarse2FineOptions {
  // Segment windows are the bounding box of the two waypoints grown by this
  // many strides of the layer above.
  double window_inflation = 1.0;
  int window_retries = 2;  // doublings before the window becomes the full layer
  int snap_radius = 3;
  unsigned threads = 1;
};

namespace detail {

struct SegmentResult {
  std::vector<GridNode> cells;
  std::size_t expanded = 0;
};

inline CellWindow window_around(const UncertaintyMap& map, const Vec2& a, const Vec2& b, double margin) {
  const double x0 = std::min(a.x, b.x) - margin, x1 = std::max(a.x, b.x) + margin;
  const double y0 = std::min(a.y, b.y) - margin, y1 = std::max(a.y, b.y) + margin;
  CellWindow w;
  w.col0 = std::max(0, static_cast<int>(std::floor((x0 - map.origin.x) / map.cell_size)));
  w.row0 = std::max(0, static_cast<int>(std::floor((y0 - map.origin.y) / map.cell_size)));
  w.col1 = std::min(map.width - 1, static_cast<int>(std::floor((x1 - map.origin.x) / map.cell_size)));
  w.row1 = std::min(map.height - 1, static_cast<int>(std::floor((y1 - map.origin.y) / map.cell_size)));
  return w;
}

// Refines a waypoint chain on one layer. Returns nullopt when some segment
// cannot be connected even on the full layer.
inline std::optional<std::vector<GridNode>> refine_layer(const std::vector<Vec2>& waypoints,
                                                         const UncertaintyMap& map, double upper_stride,
                                                         const Coarse2FineOptions& opt, std::size_t& expanded,
                                                         std::size_t& segments) {
  std::vector<GridNode> cells;
  cells.reserve(waypoints.size());
  for (const auto& w : waypoints) {
    auto c = snap_to_free(map, w, opt.snap_radius);
    if (!c) return std::nullopt;
    cells.push_back(*c);
  }
  if (cells.size() == 1) return cells;
  const std::size_t n_seg = cells.size() - 1;
  std::vector<SegmentResult> results(n_seg);
  parallel_for(
      n_seg,
      [&](std::size_t i) {
        auto& out = results[i];
        if (cells[i] == cells[i + 1]) {
          out.cells = {cells[i]};
          return;
        }
        double margin = opt.window_inflation * upper_stride;
        for (int attempt = 0; attempt <= opt.window_retries + 1; ++attempt) {
          const CellWindow win = attempt > opt.window_retries
                                     ? CellWindow::full(map)
                                     : window_around(map, waypoints[i], waypoints[i + 1], margin);
          // Snapped endpoints may sit just outside a tight window.
          CellWindow w = win;
          for (const auto& c : {cells[i], cells[i + 1]}) {
            w.col0 = std::min(w.col0, c.col);
            w.row0 = std::min(w.row0, c.row);
            w.col1 = std::max(w.col1, c.col);
            w.row1 = std::max(w.row1, c.row);
          }
          out.cells = astar_search(cells[i], cells[i + 1], map, EdgeCostModel::kUncertainty, w, &out.expanded);
          if (!out.cells.empty()) return;
          margin *= 2.0;
        }
      },
      opt.threads);

  std::vector<GridNode> merged;
  for (std::size_t i = 0; i < n_seg; ++i) {
    expanded += results[i].expanded;
    if (results[i].cells.empty()) return std::nullopt;
    const auto& seg = results[i].cells;
    // The shared endpoint of consecutive segments appears once.
    const std::size_t skip = merged.empty() ? 0 : 1;
    merged.insert(merged.end(), seg.begin() + static_cast<std::ptrdiff_t>(skip), seg.end());
  }
  segments += n_seg;
  return merged;
}

}  // namespace detail

/// Hierarchical uncertainty-aware A*: plan on the coarsest layer, then
/// refine each consecutive waypoint pair on every finer layer inside a
/// window around that pair. Falls back to single-layer fine A* when the
/// hierarchy cannot connect start and goal.
inline PlanResult coarse2fine_plan(const Vec2& start, const Vec2& goal, const MapPyramid& pyramid,
                                   const Coarse2FineOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  const UncertaintyMap& fine = pyramid.fine();
  require_inside(fine, start, "start");
  require_inside(fine, goal, "goal");
  const auto s_fine = snap_to_free(fine, start, opt.snap_radius);
  const auto g_fine = snap_to_free(fine, goal, opt.snap_radius);
  if (!s_fine || !g_fine)
    throw Error(ErrorCode::kBlockedNode, "coarse2fine: start or goal has no free cell within 3 strides");
  const Vec2 start_w = fine.cell_center(s_fine->col, s_fine->row);
  const Vec2 goal_w = fine.cell_center(g_fine->col, g_fine->row);

  PlanResult res;
  auto finish = [&](GlobalPath path) {
    res.path = std::move(path);
    res.stats.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.stats.length_m = path_length(res.path);
    res.stats.mean_uncertainty = path_uncertainty(res.path, fine);
    return res;
  };
  auto fallback = [&]() {
    std::size_t extra = 0;
    const auto cells = astar_search(*s_fine, *g_fine, fine, EdgeCostModel::kUncertainty, std::nullopt, &extra);
    res.stats.expanded += extra;
    res.stats.fallback = true;
    if (cells.empty()) throw Error(ErrorCode::kUnreachable, "coarse2fine: goal unreachable");
    return finish(detail::to_world(cells, fine, 0));
  };

  const std::size_t top = pyramid.depth() - 1;
  const UncertaintyMap& coarse = pyramid.coarse();
  const auto s_c = snap_to_free(coarse, start_w, opt.snap_radius);
  const auto g_c = snap_to_free(coarse, goal_w, opt.snap_radius);
  if (!s_c || !g_c) return fallback();
  const auto coarse_cells = astar_search(*s_c, *g_c, coarse, EdgeCostModel::kUncertainty, std::nullopt,
                                         &res.stats.expanded);
  if (coarse_cells.empty()) return fallback();

  std::vector<Vec2> waypoints;
  waypoints.reserve(coarse_cells.size());
  for (const auto& c : coarse_cells) waypoints.push_back(coarse.cell_center(c.col, c.row));
  waypoints.front() = start_w;
  if (waypoints.size() == 1) waypoints.push_back(goal_w);
  else waypoints.back() = goal_w;

  std::vector<GridNode> cells;
  for (std::size_t l = top; l-- > 0;) {
    const UncertaintyMap& layer = pyramid.layers[l];
    auto refined = detail::refine_layer(waypoints, layer, pyramid.layers[l + 1].cell_size, opt, res.stats.expanded,
                                        res.stats.segments);
    if (!refined) return fallback();
    cells = std::move(*refined);
    waypoints.clear();
    for (const auto& c : cells) waypoints.push_back(layer.cell_center(c.col, c.row));
    waypoints.front() = start_w;
    waypoints.back() = goal_w;
  }
  return finish(detail::to_world(cells, fine, 0));
}

}  // namespace riskplan
