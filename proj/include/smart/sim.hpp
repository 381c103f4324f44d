#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "smart/planner.hpp"
#include "smart/pruning.hpp"
#include "smart/random.hpp"
#include "smart/scenario.hpp"

namespace smart {

/// Random-walk leg of an obstacle.
struct WalkState {
  double heading = 0.0;
  double remaining = 0.0;
};

struct SimObstacle {
  ObstacleState state;
  WalkState walk;
  /// Set for scripted obstacles, which ignore the walk.
  std::optional<Point2> velocity;
  Rng rng;
};

/// Advances one obstacle by `duration` seconds. A walk leg that is used up, or
/// whose next position would leave the workspace or cross an occupied cell,
/// is redrawn (heading in [0, 2pi), length in [0, walk_max]) up to 50 times;
/// after that the obstacle holds still for this step.
void obstacle_step(SimObstacle& o, const StaticMap& map, double duration, double walk_max);

struct Perception {
  Point2 cobot;
  std::vector<ObstacleState> obstacles;
};

/// Noisy view: the cobot position gets independent per-axis localisation
/// error, and each obstacle is placed from the perceived cobot by its true
/// range and bearing, each with bounded uniform error. Speeds are exact.
Perception perceive(Point2 cobot, std::span<const ObstacleState> obstacles, const NoiseModel& noise, Rng& rng);

struct TrialResult {
  bool success = false;
  bool collision = false;
  bool timeout = false;
  /// Only meaningful when success is true.
  double travel_time = 0.0;
  /// Charged time of every successful replan, seconds.
  std::vector<double> replanning_times;
  /// Measured wall time of the same replans, seconds.
  std::vector<double> replanning_wall_times;
  std::size_t replan_count = 0;
  std::size_t failed_ticks = 0;
  std::size_t ticks = 0;
  double motion_time = 0.0;
  double charged_time = 0.0;
  double distance_travelled = 0.0;
};

/// Per-tick callbacks used for traces.
class TrialObserver {
 public:
  virtual ~TrialObserver() = default;
  virtual void on_start(const ScenarioConfig& /*cfg*/, const Planner& /*planner*/,
                        std::span<const SimObstacle> /*obstacles*/) {}
  /// Called after the planner tick, before anything moves.
  virtual void on_tick(double /*t*/, Point2 /*cobot*/, std::span<const SimObstacle> /*obstacles*/,
                       const TickOutcome& /*outcome*/, const Planner& /*planner*/) {}
  virtual void on_finish(const TrialResult& /*result*/) {}
};

/// Initial obstacle set for a trial: scripted obstacles if the scenario lists
/// any, otherwise random walkers placed away from the start and redrawn until
/// one of them enters the corridor around `initial_path` within the nominal
/// travel time (or the attempt limit is reached).
std::vector<SimObstacle> spawn_obstacles(const ScenarioConfig& cfg, std::span<const Point2> initial_path,
                                         std::uint64_t seed);

/// One full episode; a pure function of (cfg, seed) unless the replanning
/// clock is in wall mode.
TrialResult run_trial(const ScenarioConfig& cfg, std::uint64_t seed, TrialObserver* observer = nullptr);

}  // namespace smart
