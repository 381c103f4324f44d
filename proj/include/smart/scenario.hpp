#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smart/geometry.hpp"
#include "smart/planner.hpp"
#include "smart/world.hpp"

namespace smart {

struct NoiseModel {
  double range_bound = 0.03;
  /// Radians.
  double heading_bound = 0.017453292519943295;
  double localization_bound = 0.02;
};

enum class ClockMode { wall, model, ideal };

/// Converts a replanning episode into simulated seconds.
struct ReplanClock {
  ClockMode mode = ClockMode::model;
  /// Nanoseconds per counted node visit or edge check (model mode).
  double ns_per_unit = 250.0;

  double charge(double wall_seconds, std::uint64_t work_units) const;
};

/// Obstacle moving at a constant velocity instead of a random walk.
struct ScriptedObstacle {
  Point2 position;
  Point2 velocity;
  double radius = 0.5;
};

struct ScenarioConfig {
  StaticMap map{Tiling({0.0, 0.0}, 32.0, 32.0, 1.0)};
  Point2 start{2.0, 2.0};
  Point2 goal{30.0, 30.0};

  int obstacle_count = 10;
  double obstacle_speed = 2.0;
  double obstacle_radius = 0.5;
  double walk_max_distance = 10.0;
  double min_start_distance = 4.0;
  /// Half-width of the corridor around the initial path that at least one
  /// obstacle must enter within the nominal travel time; 0 disables the check.
  double corridor_half_width = 2.0;
  int corridor_attempts = 100;
  std::vector<ScriptedObstacle> scripted;

  NoiseModel noise;
  double dt = 0.05;
  double timeout_factor = 10.0;
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<int> bench_counts{10};
  std::vector<double> bench_speeds{1.0, 2.0, 3.0, 4.0};

  ReplanClock clock;
  PlannerConfig planner;
};

/// Malformed scenario or map content. `what()` carries line/column when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The scenario or map file does not exist.
class NotFoundError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Map text: header `width height cell_size`, then one line of `#`/`.` per
/// row, the first line being row 0 (y = 0).
StaticMap parse_map(std::istream& in);
StaticMap load_map(const std::filesystem::path& path);

/// JSON scenario text; relative map paths are resolved against `base_dir`.
ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Throws ConfigError when values are out of range.
void validate(const ScenarioConfig& cfg);

}  // namespace smart
