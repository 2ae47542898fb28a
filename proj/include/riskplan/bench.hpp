#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <string>
#include <vector>

#include "riskplan/io.hpp"
#include "riskplan/pipeline.hpp"

namespace riskplan {

struct PairSpec {
  Vec2 start;
  Vec2 goal;
};

/// Default benchmark start/goal pairs, in meters on a 2000 m map.
inline std::vector<PairSpec> default_pairs() {
  return {{{50, 60}, {1950, 1950}},   {{1000, 150}, {500, 1850}}, {{1950, 50}, {500, 1250}},
          {{1750, 1950}, {230, 340}}, {{50, 80}, {1850, 20}},     {{210, 560}, {1050, 1940}},
          {{1340, 250}, {1940, 1820}}, {{1030, 930}, {1260, 170}}, {{160, 1340}, {1390, 570}},
          {{260, 530}, {1730, 840}}};
}

inline std::vector<PairSpec> pairs_from_csv(const std::string& text, const std::string& file) {
  const auto lines = data_lines(text);
  if (lines.empty() || lines[0].second != "start_x,start_y,goal_x,goal_y")
    throw Error(ErrorCode::kParse, file + ": missing 'start_x,start_y,goal_x,goal_y' header");
  std::vector<PairSpec> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto r = parse_row(lines[i], file, 4);
    out.push_back({{r[0], r[1]}, {r[2], r[3]}});
  }
  return out;
}

inline std::string pairs_to_csv(const std::vector<PairSpec>& pairs) {
  std::string out = "start_x,start_y,goal_x,goal_y\n";
  for (const auto& p : pairs)
    out += fmt_double(p.start.x) + "," + fmt_double(p.start.y) + "," + fmt_double(p.goal.x) + "," +
           fmt_double(p.goal.y) + "\n";
  return out;
}

// Report column order.
inline constexpr std::array<GlobalAlgo, 3> kBenchAlgos = {GlobalAlgo::kTraditional, GlobalAlgo::kImproved,
                                                          GlobalAlgo::kCoarse2Fine};

struct AlgoRun {
  bool ok = false;
  std::string error;
  SearchStats stats;  // wall_time_s is the median over repeats
};

struct BenchRow {
  std::string map;
  PairSpec pair;
  std::array<AlgoRun, 3> runs;

  bool all_ok() const { return runs[0].ok && runs[1].ok && runs[2].ok; }
  // (I-A* - Ours) / I-A* on mean path uncertainty.
  double improvement() const {
    const double i = runs[1].stats.mean_uncertainty, c = runs[2].stats.mean_uncertainty;
    return i > 0.0 ? (i - c) / i : 0.0;
  }
  bool ordered() const {
    return runs[2].stats.mean_uncertainty < runs[1].stats.mean_uncertainty &&
           runs[1].stats.mean_uncertainty < runs[0].stats.mean_uncertainty;
  }
};

struct BenchSummary {
  std::size_t rows = 0;
  std::size_t complete = 0;  // rows where all three algorithms succeeded
  std::size_t ordered = 0;   // complete rows with Ours < I-A* < T-A*
  std::array<double, 3> mean_uncertainty{};
  std::array<double, 3> mean_time_s{};
  std::array<double, 3> mean_expanded{};
  double improvement_row_mean = 0.0;  // mean of per-row improvements
  double improvement_of_means = 0.0;  // from the averaged uncertainties
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<std::string> config;

  /// Averages over complete rows only; incomplete rows are flagged in the
  /// tables and excluded.
  BenchSummary summary() const {
    BenchSummary s;
    s.rows = rows.size();
    for (const auto& r : rows) {
      if (!r.all_ok()) continue;
      ++s.complete;
      s.ordered += r.ordered() ? 1 : 0;
      for (std::size_t k = 0; k < 3; ++k) {
        s.mean_uncertainty[k] += r.runs[k].stats.mean_uncertainty;
        s.mean_time_s[k] += r.runs[k].stats.wall_time_s;
        s.mean_expanded[k] += static_cast<double>(r.runs[k].stats.expanded);
      }
      s.improvement_row_mean += r.improvement();
    }
    if (s.complete == 0) return s;
    const double n = static_cast<double>(s.complete);
    for (std::size_t k = 0; k < 3; ++k) {
      s.mean_uncertainty[k] /= n;
      s.mean_time_s[k] /= n;
      s.mean_expanded[k] /= n;
    }
    s.improvement_row_mean /= n;
    s.improvement_of_means =
        s.mean_uncertainty[1] > 0.0 ? (s.mean_uncertainty[1] - s.mean_uncertainty[2]) / s.mean_uncertainty[1] : 0.0;
    return s;
  }
};

struct BenchOptions {
  int repeats = 1;  // timing repeats per run; the median is reported
  Coarse2FineOptions c2f;
};

/// Runs all three planners on every pair. Only the planning call is timed;
/// the pyramid is built beforehand.
inline std::vector<BenchRow> run_global_bench(const MapPyramid& pyramid, const std::vector<PairSpec>& pairs,
                                              const BenchOptions& opt, const std::string& map_name = "") {
  if (opt.repeats < 1) throw Error(ErrorCode::kInvalidArgument, "bench: repeats must be >= 1");
  std::vector<BenchRow> rows;
  for (const auto& pair : pairs) {
    BenchRow row;
    row.map = map_name;
    row.pair = pair;
    for (std::size_t k = 0; k < kBenchAlgos.size(); ++k) {
      AlgoRun& run = row.runs[k];
      std::vector<double> times;
      try {
        for (int rep = 0; rep < opt.repeats; ++rep) {
          const PlanResult res = plan_global(pair.start, pair.goal, pyramid, kBenchAlgos[k], opt.c2f);
          times.push_back(res.stats.wall_time_s);
          run.stats = res.stats;
        }
        std::sort(times.begin(), times.end());
        run.stats.wall_time_s = times[times.size() / 2];
        run.ok = true;
      } catch (const Error& e) {
        run.ok = false;
        run.error = std::string(to_string(e.code())) + ": " + e.what();
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string pct(double v) { return fmt_fixed(100.0 * v, 2) + "%"; }

inline json report_to_json(const BenchReport& rep) {
  const BenchSummary s = rep.summary();
  json j;
  j["config"] = rep.config;
  j["algorithms"] = {"tastar", "iastar", "c2f"};
  j["rows"] = json::array();
  for (const auto& r : rep.rows) {
    json row = {{"map", r.map},
                {"start", {r.pair.start.x, r.pair.start.y}},
                {"goal", {r.pair.goal.x, r.pair.goal.y}},
                {"complete", r.all_ok()}};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& run = r.runs[k];
      row[to_string(kBenchAlgos[k])] = run.ok ? stats_to_json(run.stats) : json{{"error", run.error}};
    }
    if (r.all_ok()) row["improvement"] = r.improvement();
    j["rows"].push_back(row);
  }
  j["summary"] = {{"rows", s.rows},
                  {"complete", s.complete},
                  {"ordered", s.ordered},
                  {"mean_uncertainty", s.mean_uncertainty},
                  {"mean_wall_time_s", s.mean_time_s},
                  {"mean_expanded", s.mean_expanded},
                  {"improvement_row_mean", s.improvement_row_mean},
                  {"improvement_of_means", s.improvement_of_means}};
  return j;
}

inline std::string report_to_csv(const BenchReport& rep) {
  std::string out = comment_block(rep.config);
  out += "map,start_x,start_y,goal_x,goal_y,complete,u_tastar,u_iastar,u_c2f,improvement,"
         "time_tastar,time_iastar,time_c2f,expanded_tastar,expanded_iastar,expanded_c2f\n";
  for (const auto& r : rep.rows) {
    out += r.map + "," + fmt_double(r.pair.start.x) + "," + fmt_double(r.pair.start.y) + "," +
           fmt_double(r.pair.goal.x) + "," + fmt_double(r.pair.goal.y) + "," + (r.all_ok() ? "1" : "0");
    for (const auto& run : r.runs) out += "," + (run.ok ? fmt_double(run.stats.mean_uncertainty) : std::string());
    out += "," + (r.all_ok() ? fmt_double(r.improvement()) : std::string());
    for (const auto& run : r.runs) out += "," + (run.ok ? fmt_double(run.stats.wall_time_s) : std::string());
    for (const auto& run : r.runs) out += "," + (run.ok ? std::to_string(run.stats.expanded) : std::string());
    out += "\n";
  }
  return out;
}

/// Two tables: path uncertainty with the
/// improvement column, then planning time.
inline std::string report_to_markdown(const BenchReport& rep) {
  const BenchSummary s = rep.summary();
  auto pt = [](const Vec2& p) { return "(" + fmt_double(p.x) + "," + fmt_double(p.y) + ")"; };
  std::string out = "## Mean path uncertainty\n\n";
  out += "| Map | Start node | Goal node | T-A* | I-A* | Ours | Improvement |\n";
  out += "|---|---|---|---|---|---|---|\n";
  for (const auto& r : rep.rows) {
    out += "| " + r.map + " | " + pt(r.pair.start) + " | " + pt(r.pair.goal) + " |";
    for (const auto& run : r.runs) out += " " + (run.ok ? fmt_fixed(run.stats.mean_uncertainty, 4) : "failed") + " |";
    out += " " + (r.all_ok() ? pct(r.improvement()) : "excluded") + " |\n";
  }
  out += "| Average | | |";
  for (double u : s.mean_uncertainty) out += " " + fmt_fixed(u, 4) + " |";
  out += " " + pct(s.improvement_row_mean) + " (row mean) |\n\n";
  out += "Improvement from the averages: " + pct(s.improvement_of_means) + ". Ordering Ours < I-A* < T-A* holds on " +
         std::to_string(s.ordered) + " of " + std::to_string(s.complete) + " complete rows.\n\n";

  out += "## Planning time (s)\n\n";
  out += "| Map | Start node | Goal node | T-A* | I-A* | Ours |\n";
  out += "|---|---|---|---|---|---|\n";
  for (const auto& r : rep.rows) {
    out += "| " + r.map + " | " + pt(r.pair.start) + " | " + pt(r.pair.goal) + " |";
    for (const auto& run : r.runs) out += " " + (run.ok ? fmt_fixed(run.stats.wall_time_s, 6) : "failed") + " |";
    out += "\n";
  }
  out += "| Average | | |";
  for (double t : s.mean_time_s) out += " " + fmt_fixed(t, 6) + " |";
  out += "\n";
  return out;
}

}  // namespace riskplan
