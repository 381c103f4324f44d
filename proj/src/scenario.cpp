#include "smart/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace smart {

using nlohmann::json;

double ReplanClock::charge(double wall_seconds, std::uint64_t work_units) const {
  switch (mode) {
    case ClockMode::wall:
      return wall_seconds;
    case ClockMode::model:
      return static_cast<double>(work_units) * ns_per_unit * 1e-9;
    case ClockMode::ideal:
      return 0.0;
  }
  return 0.0;
}

StaticMap parse_map(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') {
        line.pop_back();
      }
      if (!line.empty()) {
        return true;
      }
    }
    return false;
  };
  if (!next_line()) {
    throw ConfigError("map: empty file");
  }
  double width = 0.0, height = 0.0, cell = 0.0;
  {
    std::istringstream header(line);
    header.imbue(std::locale::classic());
    if (!(header >> width >> height >> cell)) {
      throw ConfigError(fmt::format("map:{}:1: expected `width height cell_size`", line_no));
    }
  }
  Tiling tiling;
  try {
    tiling = Tiling({0.0, 0.0}, width, height, cell);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("map:{}:1: {}", line_no, e.what()));
  }
  std::vector<std::uint8_t> occ(tiling.cell_count(), 0);
  for (int r = 0; r < tiling.rows(); ++r) {
    if (!next_line()) {
      throw ConfigError(fmt::format("map: expected {} rows, found {}", tiling.rows(), r));
    }
    if (static_cast<int>(line.size()) != tiling.cols()) {
      throw ConfigError(fmt::format("map:{}:1: expected {} columns, found {}", line_no, tiling.cols(), line.size()));
    }
    for (int c = 0; c < tiling.cols(); ++c) {
      const char ch = line[static_cast<std::size_t>(c)];
      if (ch != '#' && ch != '.') {
        throw ConfigError(fmt::format("map:{}:{}: unexpected character '{}'", line_no, c + 1, ch));
      }
      occ[tiling.linear({c, r})] = ch == '#' ? 1 : 0;
    }
  }
  if (next_line()) {
    throw ConfigError(fmt::format("map:{}:1: trailing content after {} rows", line_no, tiling.rows()));
  }
  return StaticMap(tiling, std::move(occ));
}

StaticMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw NotFoundError(fmt::format("map not found: {}", path.string()));
  }
  try {
    return parse_map(in);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ConfigError(fmt::format("scenario: '{}' must be an object", where));
  }
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      known = known || key == a;
    }
    if (!known) {
      throw ConfigError(fmt::format("scenario: unknown field '{}{}'", where.empty() ? "" : where + ".", key));
    }
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return;
  }
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("scenario: field '{}{}' has the wrong type", where.empty() ? "" : where + ".", key));
  }
}

void read_point(const json& obj, const char* key, Point2& out, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return;
  }
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
    throw ConfigError(fmt::format("scenario: field '{}.{}' must be [x, y]", where, key));
  }
  out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte);
    throw ConfigError(fmt::format("scenario:{}:{}: invalid JSON", line, col));
  }
  check_keys(root, "",
             {"workspace", "static_map", "inflate_map", "cobot", "obstacles", "planner", "noise", "dt",
              "timeout_factor", "trials", "seed", "bench", "replan_clock"});

  ScenarioConfig cfg;
  Point2 origin{0.0, 0.0};
  double width = 32.0, height = 32.0, cell = 1.0;
  bool has_workspace = false;
  if (const auto it = root.find("workspace"); it != root.end()) {
    check_keys(*it, "workspace", {"origin", "width", "height", "cell_size"});
    has_workspace = true;
    read_point(*it, "origin", origin, "workspace");
    read(*it, "width", width, "workspace");
    read(*it, "height", height, "workspace");
    read(*it, "cell_size", cell, "workspace");
  }

  if (const auto it = root.find("cobot"); it != root.end()) {
    check_keys(*it, "cobot", {"start", "goal", "speed", "radius"});
    read_point(*it, "start", cfg.start, "cobot");
    read_point(*it, "goal", cfg.goal, "cobot");
    read(*it, "speed", cfg.planner.v_r, "cobot");
    read(*it, "radius", cfg.planner.robot_radius, "cobot");
  }

  std::string map_path;
  bool inflate = false;
  read(root, "static_map", map_path, "");
  read(root, "inflate_map", inflate, "");
  if (!map_path.empty()) {
    std::filesystem::path p(map_path);
    if (p.is_relative()) {
      p = base_dir / p;
    }
    StaticMap loaded = load_map(p);
    const Tiling& lt = loaded.tiling();
    if (has_workspace && (lt.width() != width || lt.height() != height || lt.cell_size() != cell)) {
      throw ConfigError("scenario: workspace dimensions disagree with the static map header");
    }
    std::vector<std::uint8_t> occ(lt.cell_count());
    for (std::size_t i = 0; i < occ.size(); ++i) {
      occ[i] = loaded.occupied(lt.from_linear(i)) ? 1 : 0;
    }
    cfg.map = StaticMap(Tiling(origin, lt.width(), lt.height(), lt.cell_size()), std::move(occ));
  } else {
    try {
      cfg.map = StaticMap(Tiling(origin, width, height, cell));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("scenario: workspace: {}", e.what()));
    }
  }
  if (inflate) {
    const int cells = static_cast<int>(std::ceil(cfg.planner.robot_radius / cfg.map.tiling().cell_size()));
    cfg.map = cfg.map.dilated(cells);
  }

  if (const auto it = root.find("obstacles"); it != root.end()) {
    check_keys(*it, "obstacles",
               {"count", "speed", "radius", "walk_max_distance", "min_start_distance", "corridor_half_width",
                "corridor_attempts", "scripted"});
    read(*it, "count", cfg.obstacle_count, "obstacles");
    read(*it, "speed", cfg.obstacle_speed, "obstacles");
    read(*it, "radius", cfg.obstacle_radius, "obstacles");
    read(*it, "walk_max_distance", cfg.walk_max_distance, "obstacles");
    read(*it, "min_start_distance", cfg.min_start_distance, "obstacles");
    read(*it, "corridor_half_width", cfg.corridor_half_width, "obstacles");
    read(*it, "corridor_attempts", cfg.corridor_attempts, "obstacles");
    if (const auto sc = it->find("scripted"); sc != it->end()) {
      if (!sc->is_array()) {
        throw ConfigError("scenario: 'obstacles.scripted' must be an array");
      }
      for (const auto& entry : *sc) {
        check_keys(entry, "obstacles.scripted[]", {"position", "velocity", "radius"});
        ScriptedObstacle s;
        s.radius = cfg.obstacle_radius;
        read_point(entry, "position", s.position, "obstacles.scripted[]");
        read_point(entry, "velocity", s.velocity, "obstacles.scripted[]");
        read(entry, "radius", s.radius, "obstacles.scripted[]");
        cfg.scripted.push_back(s);
      }
    }
  }

  if (const auto it = root.find("planner"); it != root.end()) {
    check_keys(*it, "planner",
               {"t_rh", "t_oh", "r_min", "l_max", "connect_radius", "rrt_samples", "tree_step", "fallback_samples",
                "fallback"});
    read(*it, "t_rh", cfg.planner.t_rh, "planner");
    read(*it, "t_oh", cfg.planner.t_oh, "planner");
    read(*it, "r_min", cfg.planner.r_min, "planner");
    read(*it, "l_max", cfg.planner.l_max, "planner");
    read(*it, "connect_radius", cfg.planner.connect_radius, "planner");
    read(*it, "rrt_samples", cfg.planner.rrt_samples, "planner");
    read(*it, "tree_step", cfg.planner.tree_step, "planner");
    read(*it, "fallback_samples", cfg.planner.fallback_samples, "planner");
    read(*it, "fallback", cfg.planner.fallback, "planner");
  }

  if (const auto it = root.find("noise"); it != root.end()) {
    check_keys(*it, "noise", {"range", "bearing_deg", "localization"});
    double bearing_deg = cfg.noise.heading_bound * 180.0 / std::numbers::pi;
    read(*it, "range", cfg.noise.range_bound, "noise");
    read(*it, "bearing_deg", bearing_deg, "noise");
    read(*it, "localization", cfg.noise.localization_bound, "noise");
    cfg.noise.heading_bound = bearing_deg * std::numbers::pi / 180.0;
  }

  read(root, "dt", cfg.dt, "");
  read(root, "timeout_factor", cfg.timeout_factor, "");
  read(root, "trials", cfg.trials, "");
  read(root, "seed", cfg.seed, "");

  if (const auto it = root.find("bench"); it != root.end()) {
    check_keys(*it, "bench", {"counts", "speeds"});
    read(*it, "counts", cfg.bench_counts, "bench");
    read(*it, "speeds", cfg.bench_speeds, "bench");
  }

  if (const auto it = root.find("replan_clock"); it != root.end()) {
    check_keys(*it, "replan_clock", {"mode", "ns_per_unit"});
    std::string mode = "model";
    read(*it, "mode", mode, "replan_clock");
    if (mode == "model") {
      cfg.clock.mode = ClockMode::model;
    } else if (mode == "wall") {
      cfg.clock.mode = ClockMode::wall;
    } else if (mode == "ideal") {
      cfg.clock.mode = ClockMode::ideal;
    } else {
      throw ConfigError(fmt::format("scenario: replan_clock.mode must be model, wall or ideal, got '{}'", mode));
    }
    read(*it, "ns_per_unit", cfg.clock.ns_per_unit, "replan_clock");
  }

  validate(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw NotFoundError(fmt::format("scenario not found: {}", path.string()));
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path.parent_path());
}

void validate(const ScenarioConfig& cfg) {
  try {
    validate(cfg.planner);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("scenario: {}", e.what()));
  }
  if (!cfg.map.free_at(cfg.start)) {
    throw ConfigError("scenario: cobot start is outside the workspace or in an occupied cell");
  }
  if (!cfg.map.free_at(cfg.goal)) {
    throw ConfigError("scenario: cobot goal is outside the workspace or in an occupied cell");
  }
  if (!(cfg.dt > 0.0) || !(cfg.timeout_factor > 0.0)) {
    throw ConfigError("scenario: dt and timeout_factor must be positive");
  }
  if (cfg.trials < 1) {
    throw ConfigError("scenario: trials must be at least 1");
  }
  if (cfg.obstacle_count < 0 || cfg.obstacle_speed < 0.0 || !(cfg.obstacle_radius > 0.0) ||
      cfg.walk_max_distance < 0.0 || cfg.corridor_half_width < 0.0 || cfg.corridor_attempts < 1) {
    throw ConfigError("scenario: obstacle settings out of range");
  }
  for (const int c : cfg.bench_counts) {
    if (c < 0) {
      throw ConfigError("scenario: bench counts must not be negative");
    }
  }
  for (const double s : cfg.bench_speeds) {
    if (s < 0.0) {
      throw ConfigError("scenario: bench speeds must not be negative");
    }
  }
  if (cfg.noise.range_bound < 0.0 || cfg.noise.heading_bound < 0.0 || cfg.noise.localization_bound < 0.0) {
    throw ConfigError("scenario: noise bounds must not be negative");
  }
  if (!(cfg.clock.ns_per_unit >= 0.0)) {
    throw ConfigError("scenario: replan_clock.ns_per_unit must not be negative");
  }
}

}  // namespace smart
