#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <toml.hpp>

#include "riskplan/global_planner.hpp"
#include "riskplan/io.hpp"
#include "riskplan/local_planner.hpp"
#include "riskplan/smoother.hpp"

namespace riskplan {

struct MapConfig {
  std::vector<double> strides = {10.0, 40.0, 80.0};
  double lambda = 0.5;
  double u_cap = kDefaultUncertaintyCap;
  double block_threshold = 0.0;  // <= 0: strongest source's k_S
};

/// Everything tunable, grouped by pipeline stage. Speeds are m/s inside;
/// the km/h keys convert on the way in and out.
struct PlannerConfig {
  MapConfig map;
  Coarse2FineOptions global;
  RollingOptions smoother;
  double reference_ds = 0.5;
  LocalPlannerConfig local;
};

using ConfigValue = std::variant<double, bool, std::vector<double>>;

namespace detail {

inline double as_number(const ConfigValue& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  throw Error(ErrorCode::kParse, "config: " + key + ": expected a number");
}

inline int as_count(const ConfigValue& v, const std::string& key) {
  const double d = as_number(v, key);
  if (d != std::floor(d) || d < 0 || d > 1e9)
    throw Error(ErrorCode::kParse, "config: " + key + ": expected a non-negative integer");
  return static_cast<int>(d);
}

inline bool as_bool(const ConfigValue& v, const std::string& key) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw Error(ErrorCode::kParse, "config: " + key + ": expected true or false");
}

inline std::vector<double> as_list(const ConfigValue& v, const std::string& key, std::size_t n = 0) {
  const auto* l = std::get_if<std::vector<double>>(&v);
  if (!l) throw Error(ErrorCode::kParse, "config: " + key + ": expected an array of numbers");
  if (n && l->size() != n)
    throw Error(ErrorCode::kParse, "config: " + key + ": expected " + std::to_string(n) + " values");
  return *l;
}

inline StateWeights as_weights(const ConfigValue& v, const std::string& key) {
  const auto l = as_list(v, key, 7);
  StateWeights w;
  std::copy(l.begin(), l.end(), w.begin());
  return w;
}

struct Key {
  std::function<void(PlannerConfig&, const ConfigValue&, const std::string&)> set;
  std::function<std::string(const PlannerConfig&)> show;
};

inline std::string show_list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt_double(v[i]);
  return s + "]";
}

template <typename Get>
Key number_key(Get get) {
  return {[get](PlannerConfig& c, const ConfigValue& v, const std::string& k) { get(c) = as_number(v, k); },
          [get](const PlannerConfig& c) { return fmt_double(get(c)); }};
}

template <typename Get>
Key count_key(Get get) {
  return {[get](PlannerConfig& c, const ConfigValue& v, const std::string& k) {
            get(c) = static_cast<std::remove_reference_t<decltype(get(c))>>(as_count(v, k));
          },
          [get](const PlannerConfig& c) { return std::to_string(get(c)); }};
}

template <typename Get>
Key kmh_key(Get get) {
  return {[get](PlannerConfig& c, const ConfigValue& v, const std::string& k) { get(c) = kmh_to_ms(as_number(v, k)); },
          [get](const PlannerConfig& c) { return fmt_double(get(c) * 3.6); }};
}

template <typename Get>
Key weights_key(Get get) {
  return {[get](PlannerConfig& c, const ConfigValue& v, const std::string& k) { get(c) = as_weights(v, k); },
          [get](const PlannerConfig& c) {
            const auto& w = get(c);
            return show_list(std::vector<double>(w.begin(), w.end()));
          }};
}

// Ordered so that echoed configs read top-down through the pipeline.
inline const std::vector<std::pair<std::string, Key>>& config_keys() {
  static const std::vector<std::pair<std::string, Key>> keys = [] {
    std::vector<std::pair<std::string, Key>> k;
    k.emplace_back("map.strides",
                   Key{[](PlannerConfig& c, const ConfigValue& v, const std::string& n) {
                         c.map.strides = as_list(v, n);
                         pooling_factors(c.map.strides);
                       },
                       [](const PlannerConfig& c) { return show_list(c.map.strides); }});
    k.emplace_back("map.lambda", number_key([](auto& c) -> auto& { return c.map.lambda; }));
    k.emplace_back("map.u_cap", number_key([](auto& c) -> auto& { return c.map.u_cap; }));
    k.emplace_back("map.block_threshold", number_key([](auto& c) -> auto& { return c.map.block_threshold; }));
    k.emplace_back("global.window_inflation",
                   number_key([](auto& c) -> auto& { return c.global.window_inflation; }));
    k.emplace_back("global.window_retries", count_key([](auto& c) -> auto& { return c.global.window_retries; }));
    k.emplace_back("global.snap_radius", count_key([](auto& c) -> auto& { return c.global.snap_radius; }));
    k.emplace_back("global.threads", count_key([](auto& c) -> auto& { return c.global.threads; }));
    k.emplace_back("smoother.w1", number_key([](auto& c) -> auto& { return c.smoother.weights.w1; }));
    k.emplace_back("smoother.w2", number_key([](auto& c) -> auto& { return c.smoother.weights.w2; }));
    k.emplace_back("smoother.w3", number_key([](auto& c) -> auto& { return c.smoother.weights.w3; }));
    k.emplace_back("smoother.s_s", number_key([](auto& c) -> auto& { return c.smoother.s_s; }));
    k.emplace_back("smoother.n_o", count_key([](auto& c) -> auto& { return c.smoother.n_o; }));
    k.emplace_back("smoother.n_b", count_key([](auto& c) -> auto& { return c.smoother.n_b; }));
    k.emplace_back("smoother.tol", number_key([](auto& c) -> auto& { return c.smoother.tol; }));
    k.emplace_back("smoother.max_iterations",
                   count_key([](auto& c) -> auto& { return c.smoother.max_iterations; }));
    k.emplace_back("reference.ds", number_key([](auto& c) -> auto& { return c.reference_ds; }));

    auto S = [](auto& c) -> auto& { return c.local.sampling; };
    k.emplace_back("sampling.option",
                   Key{[S](PlannerConfig& c, const ConfigValue& v, const std::string& n) {
                         const int opt = as_count(v, n);
                         if (opt != 1 && opt != 2) throw Error(ErrorCode::kParse, "config: " + n + ": expected 1 or 2");
                         const SamplingSpec base = opt == 1 ? SamplingSpec::option1() : SamplingSpec::option2();
                         SamplingSpec& s = S(c);
                         s.t_lower = base.t_lower;
                         s.t_upper = base.t_upper;
                         s.d_lower = base.d_lower;
                         s.d_upper = base.d_upper;
                         s.s_lower = base.s_lower;
                         s.s_upper = base.s_upper;
                       },
                       nullptr});
    k.emplace_back("sampling.t_min", number_key([S](auto& c) -> auto& { return S(c).t_min; }));
    k.emplace_back("sampling.t_max", number_key([S](auto& c) -> auto& { return S(c).t_max; }));
    k.emplace_back("sampling.t_ref", number_key([S](auto& c) -> auto& { return S(c).t_ref; }));
    k.emplace_back("sampling.t_lower", count_key([S](auto& c) -> auto& { return S(c).t_lower; }));
    k.emplace_back("sampling.t_upper", count_key([S](auto& c) -> auto& { return S(c).t_upper; }));
    k.emplace_back("sampling.d_min", number_key([S](auto& c) -> auto& { return S(c).d_min; }));
    k.emplace_back("sampling.d_max", number_key([S](auto& c) -> auto& { return S(c).d_max; }));
    k.emplace_back("sampling.d_lower", count_key([S](auto& c) -> auto& { return S(c).d_lower; }));
    k.emplace_back("sampling.d_upper", count_key([S](auto& c) -> auto& { return S(c).d_upper; }));
    k.emplace_back("sampling.s_min_ratio", number_key([S](auto& c) -> auto& { return S(c).s_min_ratio; }));
    k.emplace_back("sampling.s_max_ratio", number_key([S](auto& c) -> auto& { return S(c).s_max_ratio; }));
    k.emplace_back("sampling.s_lower", count_key([S](auto& c) -> auto& { return S(c).s_lower; }));
    k.emplace_back("sampling.s_upper", count_key([S](auto& c) -> auto& { return S(c).s_upper; }));
    k.emplace_back("sampling.v_ref_kmh", kmh_key([S](auto& c) -> auto& { return S(c).v_ref; }));
    k.emplace_back("sampling.dt", number_key([S](auto& c) -> auto& { return S(c).dt; }));
    k.emplace_back("sampling.min_reference_speed",
                   number_key([S](auto& c) -> auto& { return S(c).min_reference_speed; }));
    k.emplace_back("sampling.advance_at_mean_speed",
                   Key{[S](PlannerConfig& c, const ConfigValue& v, const std::string& n) {
                         S(c).advance_at_mean_speed = as_bool(v, n);
                       },
                       [S](const PlannerConfig& c) {
                         return std::string(S(c).advance_at_mean_speed ? "true" : "false");
                       }});

    auto C = [](auto& c) -> auto& { return c.local.constraints; };
    k.emplace_back("constraints.v_min_kmh", kmh_key([C](auto& c) -> auto& { return C(c).v_min; }));
    k.emplace_back("constraints.v_max_kmh", kmh_key([C](auto& c) -> auto& { return C(c).v_max; }));
    k.emplace_back("constraints.ay_min", number_key([C](auto& c) -> auto& { return C(c).ay_min; }));
    k.emplace_back("constraints.ay_max", number_key([C](auto& c) -> auto& { return C(c).ay_max; }));
    k.emplace_back("constraints.ax_min", number_key([C](auto& c) -> auto& { return C(c).ax_min; }));
    k.emplace_back("constraints.ax_max", number_key([C](auto& c) -> auto& { return C(c).ax_max; }));
    k.emplace_back("constraints.c_min", number_key([C](auto& c) -> auto& { return C(c).c_min; }));
    k.emplace_back("constraints.c_max", number_key([C](auto& c) -> auto& { return C(c).c_max; }));
    k.emplace_back("constraints.e_thld", number_key([C](auto& c) -> auto& { return C(c).e_thld; }));

    auto W = [](auto& c) -> auto& { return c.local.weights; };
    k.emplace_back("weights.w_a", number_key([W](auto& c) -> auto& { return W(c).w_a; }));
    k.emplace_back("weights.w_s", number_key([W](auto& c) -> auto& { return W(c).w_s; }));
    k.emplace_back("weights.w_d", number_key([W](auto& c) -> auto& { return W(c).w_d; }));
    k.emplace_back("weights.w_t", weights_key([W](auto& c) -> auto& { return W(c).w_t; }));
    k.emplace_back("weights.w_e", number_key([W](auto& c) -> auto& { return W(c).w_e; }));
    k.emplace_back("weights.w_c", weights_key([W](auto& c) -> auto& { return W(c).w_c; }));

    k.emplace_back("local.approximate_ay",
                   Key{[](PlannerConfig& c, const ConfigValue& v, const std::string& n) {
                         c.local.approximate_ay = as_bool(v, n);
                       },
                       [](const PlannerConfig& c) { return std::string(c.local.approximate_ay ? "true" : "false"); }});
    k.emplace_back("local.threads", count_key([](auto& c) -> auto& { return c.local.threads; }));
    return k;
  }();
  return keys;
}

}  // namespace detail

inline void apply_setting(PlannerConfig& cfg, const std::string& key, const ConfigValue& value) {
  for (const auto& [name, k] : detail::config_keys()) {
    if (name == key) {
      k.set(cfg, value, key);
      return;
    }
  }
  throw Error(ErrorCode::kParse, "config: unknown key '" + key + "'");
}

/// Parses "section.key=value" where value is a number, true/false, or a
/// comma list in brackets.
inline void apply_assignment(PlannerConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(ErrorCode::kParse, "config: expected key=value, got '" + assignment + "'");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string val = trim(assignment.substr(eq + 1));
  ConfigValue v;
  if (val == "true" || val == "false") {
    v = val == "true";
  } else if (!val.empty() && val.front() == '[' && val.back() == ']') {
    std::vector<double> list;
    for (const auto& tok : split(val.substr(1, val.size() - 2), ','))
      if (!trim(tok).empty()) list.push_back(parse_number(tok, "config: " + key));
    v = list;
  } else {
    v = parse_number(val, "config: " + key);
  }
  apply_setting(cfg, key, v);
}

/// Layered TOML: [section] tables holding key = value pairs.
inline void apply_toml(PlannerConfig& cfg, const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw Error(ErrorCode::kParse, source + ":" + std::to_string(e.source().begin.line) + ": " +
                                       std::string(e.description()));
  }
  for (const auto& [section, node] : root) {
    const auto* tbl = node.as_table();
    if (!tbl) throw Error(ErrorCode::kParse, source + ": top-level key '" + std::string(section.str()) + "' is not a table");
    for (const auto& [key, value] : *tbl) {
      const std::string name = std::string(section.str()) + "." + std::string(key.str());
      ConfigValue v;
      if (auto b = value.value_exact<bool>()) {
        v = *b;
      } else if (auto d = value.value<double>()) {
        v = *d;
      } else if (const auto* arr = value.as_array()) {
        std::vector<double> list;
        for (const auto& e : *arr) {
          auto x = e.value<double>();
          if (!x) throw Error(ErrorCode::kParse, source + ": " + name + ": array must hold numbers");
          list.push_back(*x);
        }
        v = list;
      } else {
        throw Error(ErrorCode::kParse, source + ": " + name + ": unsupported value type");
      }
      apply_setting(cfg, name, v);
    }
  }
}

inline void load_toml_config(PlannerConfig& cfg, const std::filesystem::path& path) {
  apply_toml(cfg, read_text(path), path.string());
}

/// spec.json: {"sampling": {...}, "constraints": {...}, "weights": {...}}
/// with the same keys as the TOML sections.
inline void apply_json_config(PlannerConfig& cfg, const json& j, const std::string& source) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, source + ": $: expected an object");
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object()) throw Error(ErrorCode::kParse, source + ": $." + section + ": expected an object");
    for (const auto& [key, value] : body.items()) {
      const std::string name = section + "." + key;
      ConfigValue v;
      if (value.is_boolean()) {
        v = value.get<bool>();
      } else if (value.is_number()) {
        v = value.get<double>();
      } else if (value.is_array()) {
        std::vector<double> list;
        for (const auto& e : value) {
          if (!e.is_number()) throw Error(ErrorCode::kParse, source + ": $." + name + ": array must hold numbers");
          list.push_back(e.get<double>());
        }
        v = list;
      } else {
        throw Error(ErrorCode::kParse, source + ": $." + name + ": unsupported value type");
      }
      try {
        apply_setting(cfg, name, v);
      } catch (const Error& e) {
        throw Error(ErrorCode::kParse, source + ": $." + name + ": " + e.what());
      }
    }
  }
}

inline void validate_config(const PlannerConfig& cfg) {
  pooling_factors(cfg.map.strides);
  if (!(cfg.map.lambda >= 0.0 && cfg.map.lambda <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "config: map.lambda must lie in [0, 1]");
  if (!(cfg.map.u_cap > 0.0 && cfg.map.u_cap < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "config: map.u_cap must lie in (0, 1)");
  if (!(cfg.reference_ds > 0.0)) throw Error(ErrorCode::kInvalidArgument, "config: reference.ds must be > 0");
  cfg.smoother.weights.validate();
  if (!(cfg.smoother.s_s >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "config: smoother.s_s must be >= 0");
  if (cfg.smoother.n_o < 3 || cfg.smoother.n_o < cfg.smoother.n_b + 2)
    throw Error(ErrorCode::kInvalidArgument, "config: smoother.n_o must be >= 3 and >= smoother.n_b + 2");
  cfg.local.sampling.validate();
  cfg.local.constraints.validate();
  cfg.local.weights.validate();
}

/// Effective configuration as "key = value" lines for output headers.
inline std::vector<std::string> config_lines(const PlannerConfig& cfg) {
  std::vector<std::string> lines;
  for (const auto& [name, k] : detail::config_keys()) {
    if (k.show) lines.push_back(name + " = " + k.show(cfg));
  }
  return lines;
}

}  // namespace riskplan
