#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskplan/common.hpp"
#include "riskplan/frenet.hpp"
#include "riskplan/global_planner.hpp"
#include "riskplan/local_planner.hpp"
#include "riskplan/riskfield.hpp"
#include "riskplan/uncmap.hpp"

namespace riskplan {

using json = nlohmann::json;

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, what + ": " + e.what());
  }
}

// Typed field access that reports failures with a JSON path such as
// $.static_sources[2].r_max.
class JsonField {
 public:
  JsonField(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }
  bool has(const std::string& key) const { return j_.is_object() && j_.contains(key); }

  JsonField operator[](const std::string& key) const {
    if (!j_.is_object()) fail("expected an object");
    if (!j_.contains(key)) throw Error(ErrorCode::kParse, path_ + "." + key + ": missing required field");
    return {j_.at(key), path_ + "." + key};
  }
  JsonField operator[](std::size_t i) const { return {j_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

  std::size_t array_size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }
  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  double number_or(const std::string& key, double fallback) const { return has(key) ? (*this)[key].number() : fallback; }
  int integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<int>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected a boolean");
    return j_.get<bool>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  Vec2 vec2() const {
    if (!j_.is_array() || j_.size() != 2 || !j_[0].is_number() || !j_[1].is_number())
      fail("expected a [x, y] number pair");
    return {j_[0].get<double>(), j_[1].get<double>()};
  }

  [[noreturn]] void fail(const std::string& msg) const { throw Error(ErrorCode::kParse, path_ + ": " + msg); }

 private:
  const json& j_;
  std::string path_;
};

// Runs a validator and prefixes its message with the field path.
template <typename T>
void validate_at(const T& value, const JsonField& f) {
  try {
    value.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, f.path() + ": " + e.what());
  }
}

inline StaticRiskSource parse_static_source(const JsonField& f) {
  StaticRiskSource s;
  s.center = f["center"].vec2();
  const JsonField g = f["geometry"];
  const std::string type = g["type"].string();
  if (type == "disc") {
    s.geometry = Disc{g["radius"].number()};
  } else if (type == "rect") {
    s.geometry = Rect{g["width"].number(), g["height"].number()};
  } else {
    g["type"].fail("unknown geometry type '" + type + "' (expected disc or rect)");
  }
  s.k_s = f["k_S"].number();
  s.r_min = f["r_min"].number();
  s.r_max = f["r_max"].number();
  s.n_order = f.number_or("n_order", 4.0);
  validate_at(s, f);
  return s;
}

inline ObstacleState parse_obstacle(const JsonField& f) {
  ObstacleState o;
  o.position = f["position"].vec2();
  o.velocity = f.has("velocity") ? f["velocity"].vec2() : Vec2{};
  o.K = f["K"].number();
  o.r_min = f["r_min"].number();
  o.r_max = f["r_max"].number();
  o.k1 = f.number_or("k1", o.k1);
  o.k2 = f.number_or("k2", o.k2);
  o.v_cap = f.number_or("v_cap", o.v_cap);
  validate_at(o, f);
  return o;
}

inline RiskScene parse_scene(const JsonField& root) {
  RiskScene scene;
  const Vec2 bounds = root["bounds"].vec2();
  scene.width = bounds.x;
  scene.height = bounds.y;
  if (root.has("static_sources")) {
    const JsonField arr = root["static_sources"];
    for (std::size_t i = 0; i < arr.array_size(); ++i) scene.static_sources.push_back(parse_static_source(arr[i]));
  }
  if (root.has("obstacles")) {
    const JsonField arr = root["obstacles"];
    for (std::size_t i = 0; i < arr.array_size(); ++i) scene.obstacles.push_back(parse_obstacle(arr[i]));
  }
  if (root.has("field_weights")) {
    const JsonField fw = root["field_weights"];
    scene.field_weights.w_p = fw["w_P"].number();
    scene.field_weights.w_d = fw["w_D"].number();
    validate_at(scene.field_weights, fw);
  }
  if (!(scene.width > 0.0 && scene.height > 0.0)) root["bounds"].fail("bounds must be positive");
  return scene;
}

inline RiskScene load_scene(const std::filesystem::path& path) {
  const json j = parse_json(read_text(path), path.string());
  return parse_scene(JsonField(j, "$"));
}

inline json geometry_to_json(const SourceGeometry& g) {
  if (const auto* d = std::get_if<Disc>(&g)) return {{"type", "disc"}, {"radius", d->radius}};
  const auto& r = std::get<Rect>(g);
  return {{"type", "rect"}, {"width", r.width}, {"height", r.height}};
}

inline json obstacle_to_json(const ObstacleState& o) {
  return {{"position", {o.position.x, o.position.y}},
          {"velocity", {o.velocity.x, o.velocity.y}},
          {"K", o.K},
          {"r_min", o.r_min},
          {"r_max", o.r_max},
          {"k1", o.k1},
          {"k2", o.k2},
          {"v_cap", o.v_cap}};
}

inline json scene_to_json(const RiskScene& s) {
  json j;
  j["bounds"] = {s.width, s.height};
  j["static_sources"] = json::array();
  for (const auto& src : s.static_sources) {
    j["static_sources"].push_back({{"center", {src.center.x, src.center.y}},
                                   {"geometry", geometry_to_json(src.geometry)},
                                   {"k_S", src.k_s},
                                   {"r_min", src.r_min},
                                   {"r_max", src.r_max},
                                   {"n_order", src.n_order}});
  }
  j["obstacles"] = json::array();
  for (const auto& o : s.obstacles) j["obstacles"].push_back(obstacle_to_json(o));
  j["field_weights"] = {{"w_P", s.field_weights.w_p}, {"w_D", s.field_weights.w_d}};
  return j;
}

// ---- CSV ----------------------------------------------------------------
// Lines starting with '#' are comments and carry provenance.

inline std::string comment_block(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += "# " + l + "\n";
  return out;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& tok, const std::string& where) {
  const std::string t = trim(tok);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, where + ": not a number: '" + t + "'");
  }
}

// Non-comment, non-empty lines with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> data_lines(const std::string& text) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.emplace_back(no, t);
  }
  return out;
}

inline std::vector<double> parse_row(const std::pair<std::size_t, std::string>& line, const std::string& file,
                                     std::size_t expected) {
  const auto toks = split(line.second, ',');
  const std::string where = file + ":" + std::to_string(line.first);
  if (expected != 0 && toks.size() != expected)
    throw Error(ErrorCode::kParse, where + ": expected " + std::to_string(expected) + " columns, got " +
                                       std::to_string(toks.size()));
  std::vector<double> row;
  row.reserve(toks.size());
  for (const auto& t : toks) row.push_back(parse_number(t, where));
  return row;
}

inline const char* kGridHeader = "origin_x,origin_y,cell_size,width,height";

inline std::string raster_to_csv(const FieldRaster& r, const std::vector<std::string>& comments = {}) {
  std::string out = comment_block(comments);
  out += std::string(kGridHeader) + "\n";
  out += fmt_double(r.origin.x) + "," + fmt_double(r.origin.y) + "," + fmt_double(r.cell_size) + "," +
         std::to_string(r.width) + "," + std::to_string(r.height) + "\n";
  for (std::size_t row = 0; row < r.height; ++row) {
    for (std::size_t col = 0; col < r.width; ++col) {
      if (col) out += ',';
      out += fmt_double(r.at(col, row));
    }
    out += '\n';
  }
  return out;
}

inline std::string map_to_csv(const UncertaintyMap& m, const std::vector<std::string>& comments = {}) {
  std::string out = comment_block(comments);
  out += std::string(kGridHeader) + "\n";
  out += fmt_double(m.origin.x) + "," + fmt_double(m.origin.y) + "," + fmt_double(m.cell_size) + "," +
         std::to_string(m.width) + "," + std::to_string(m.height) + "\n";
  for (int row = 0; row < m.height; ++row) {
    for (int col = 0; col < m.width; ++col) {
      if (col) out += ',';
      out += fmt_double(m.at(col, row));
    }
    out += '\n';
  }
  out += "blocked\n";
  for (int row = 0; row < m.height; ++row) {
    for (int col = 0; col < m.width; ++col) {
      if (col) out += ',';
      out += m.is_blocked(col, row) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

inline UncertaintyMap map_from_csv(const std::string& text, const std::string& file) {
  const auto lines = data_lines(text);
  if (lines.size() < 2 || lines[0].second != kGridHeader)
    throw Error(ErrorCode::kParse, file + ": missing '" + std::string(kGridHeader) + "' header");
  const auto head = parse_row(lines[1], file, 5);
  UncertaintyMap m;
  m.origin = {head[0], head[1]};
  m.cell_size = head[2];
  m.width = static_cast<int>(head[3]);
  m.height = static_cast<int>(head[4]);
  if (m.width <= 0 || m.height <= 0 || m.width != head[3] || m.height != head[4])
    throw Error(ErrorCode::kParse, file + ":" + std::to_string(lines[1].first) + ": invalid dimensions");
  const auto h = static_cast<std::size_t>(m.height), w = static_cast<std::size_t>(m.width);
  if (lines.size() != 2 + h + 1 + h)
    throw Error(ErrorCode::kParse, file + ": expected " + std::to_string(h) + " value rows, a 'blocked' line and " +
                                       std::to_string(h) + " bitmap rows");
  m.u.reserve(w * h);
  for (std::size_t r = 0; r < h; ++r) {
    const auto row = parse_row(lines[2 + r], file, w);
    m.u.insert(m.u.end(), row.begin(), row.end());
  }
  if (lines[2 + h].second != "blocked")
    throw Error(ErrorCode::kParse, file + ":" + std::to_string(lines[2 + h].first) + ": expected 'blocked'");
  m.blocked.reserve(w * h);
  for (std::size_t r = 0; r < h; ++r) {
    for (double v : parse_row(lines[3 + h + r], file, w)) {
      if (v != 0.0 && v != 1.0)
        throw Error(ErrorCode::kParse, file + ":" + std::to_string(lines[3 + h + r].first) + ": bitmap must be 0/1");
      m.blocked.push_back(static_cast<std::uint8_t>(v));
    }
  }
  try {
    m.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, file + ": " + e.what());
  }
  return m;
}

// 8-bit grayscale, values mapped linearly to [0, 255] by the maximum.
// Row 0 of the image is the top (highest y).
template <typename Value>
std::string grid_to_pgm(std::size_t width, std::size_t height, Value value) {
  double vmax = 0.0;
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) vmax = std::max(vmax, value(c, r));
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.reserve(out.size() + width * height);
  for (std::size_t r = height; r-- > 0;) {
    for (std::size_t c = 0; c < width; ++c) {
      const double v = vmax > 0.0 ? value(c, r) / vmax : 0.0;
      out += static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
    }
  }
  return out;
}

inline std::string raster_to_pgm(const FieldRaster& r) {
  return grid_to_pgm(r.width, r.height, [&](std::size_t c, std::size_t row) { return r.at(c, row); });
}

inline std::string map_to_pgm(const UncertaintyMap& m) {
  return grid_to_pgm(static_cast<std::size_t>(m.width), static_cast<std::size_t>(m.height),
                     [&](std::size_t c, std::size_t r) { return m.at(static_cast<int>(c), static_cast<int>(r)); });
}

// ---- paths --------------------------------------------------------------

inline std::string path_to_csv(std::span<const Vec2> nodes, const std::vector<std::string>& comments = {}) {
  std::string out = comment_block(comments) + "x_m,y_m\n";
  for (const auto& p : nodes) out += fmt_double(p.x) + "," + fmt_double(p.y) + "\n";
  return out;
}

// Reads the first two columns of an x_m,y_m[,...] file.
inline std::vector<Vec2> path_from_csv(const std::string& text, const std::string& file) {
  const auto lines = data_lines(text);
  if (lines.empty() || lines[0].second.rfind("x_m,y_m", 0) != 0)
    throw Error(ErrorCode::kParse, file + ": missing 'x_m,y_m' header");
  const std::size_t cols = split(lines[0].second, ',').size();
  std::vector<Vec2> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto row = parse_row(lines[i], file, cols);
    out.push_back({row[0], row[1]});
  }
  if (out.empty()) throw Error(ErrorCode::kParse, file + ": path has no nodes");
  return out;
}

inline std::string reference_to_csv(const ReferencePath& ref, const std::vector<std::string>& comments = {}) {
  std::string out = comment_block(comments) + "x_m,y_m,s,theta,c\n";
  for (std::size_t i = 0; i < ref.size(); ++i) {
    out += fmt_double(ref.x[i]) + "," + fmt_double(ref.y[i]) + "," + fmt_double(ref.s[i]) + "," +
           fmt_double(ref.theta[i]) + "," + fmt_double(ref.kappa[i]) + "\n";
  }
  return out;
}

inline std::string trajectory_to_csv(const CandidateTrajectory& t, const std::vector<std::string>& comments = {}) {
  std::string out = comment_block(comments) + "t,x,y,s,d,v,ay,ax,c,e\n";
  for (const auto& p : t.points) {
    out += fmt_double(p.t) + "," + fmt_double(p.x) + "," + fmt_double(p.y) + "," + fmt_double(p.s) + "," +
           fmt_double(p.d) + "," + fmt_double(p.v) + "," + fmt_double(p.a_y) + "," + fmt_double(p.a_x) + "," +
           fmt_double(p.c) + "," + fmt_double(p.e) + "\n";
  }
  out += "# cost J_s=" + fmt_double(t.cost.j_s) + " J_t=" + fmt_double(t.cost.j_t) + " J_e=" + fmt_double(t.cost.j_e) +
         " J_c=" + fmt_double(t.cost.j_c) + " J=" + fmt_double(t.cost.total) + "\n";
  return out;
}

inline json stats_to_json(const SearchStats& s) {
  return {{"expanded", s.expanded},
          {"wall_time_s", s.wall_time_s},
          {"length_m", s.length_m},
          {"mean_uncertainty", s.mean_uncertainty},
          {"fallback", s.fallback},
          {"segments", s.segments}};
}

// ---- map directories ----------------------------------------------------
// pyramid.json names the layer files; layers are stored finest first.

inline void save_pyramid_dir(const std::filesystem::path& dir, const MapPyramid& pyr,
                             const std::vector<std::string>& comments = {}) {
  std::filesystem::create_directories(dir);
  json meta = {{"strides", pyr.strides}, {"lambda", pyr.lambda}, {"layers", json::array()}, {"config", comments}};
  for (std::size_t l = 0; l < pyr.layers.size(); ++l) {
    const std::string name = "layer" + std::to_string(l);
    auto header = comments;
    header.push_back("layer " + std::to_string(l) + " stride " + fmt_double(pyr.strides[l]));
    write_text(dir / (name + ".csv"), map_to_csv(pyr.layers[l], header));
    write_text(dir / (name + ".pgm"), map_to_pgm(pyr.layers[l]));
    meta["layers"].push_back(name + ".csv");
  }
  write_text(dir / "pyramid.json", meta.dump(2) + "\n");
}

inline MapPyramid load_pyramid_dir(const std::filesystem::path& dir) {
  const std::string meta_file = (dir / "pyramid.json").string();
  const json meta = parse_json(read_text(dir / "pyramid.json"), meta_file);
  const JsonField root(meta, "$");
  MapPyramid pyr;
  for (std::size_t i = 0; i < root["strides"].array_size(); ++i) pyr.strides.push_back(root["strides"][i].number());
  pyr.lambda = root["lambda"].number();
  const JsonField layers = root["layers"];
  if (layers.array_size() != pyr.strides.size())
    throw Error(ErrorCode::kParse, meta_file + ": $.layers: expected one file per stride");
  try {
    pooling_factors(pyr.strides);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParse, meta_file + ": $.strides: " + e.what());
  }
  for (std::size_t l = 0; l < layers.array_size(); ++l) {
    const auto file = dir / layers[l].string();
    UncertaintyMap m = map_from_csv(read_text(file), file.string());
    if (std::abs(m.cell_size - pyr.strides[l]) > 1e-9 * pyr.strides[l])
      throw Error(ErrorCode::kParse, file.string() + ": cell size does not match stride " + fmt_double(pyr.strides[l]));
    pyr.layers.push_back(std::move(m));
  }
  return pyr;
}

}  // namespace riskplan
