#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "smart/forest.hpp"
#include "smart/pruning.hpp"
#include "smart/random.hpp"
#include "smart/repair.hpp"
#include "smart/tree.hpp"
#include "smart/world.hpp"

namespace smart {

struct PlannerConfig {
  double t_rh = 0.8;
  double t_oh = 0.4;
  double robot_radius = 0.5;
  double v_r = 4.0;
  /// LRZ floor; 0 means one cell.
  double r_min = 0.0;
  /// 0 picks the covering window size per episode.
  int l_max = 0;
  /// 0 means 1.5 cells.
  double connect_radius = 0.0;
  std::size_t rrt_samples = 2048;
  /// Tree steering step; 0 means one cell.
  double tree_step = 0.0;
  std::uint64_t seed = 1;
  std::size_t fallback_samples = 2000;
  bool fallback = true;
};

/// Throws std::invalid_argument for non-positive speeds, horizons or radii and
/// for an even window limit.
void validate(const PlannerConfig& cfg);

/// Time-embedded polyline. nodes[i] is the tree node behind waypoints[i]
/// (NodeId::none for the cobot's own position).
struct Trajectory {
  std::vector<Point2> waypoints;
  std::vector<NodeId> nodes;
  std::vector<double> segment_times;
  double start_time = 0.0;

  bool empty() const { return waypoints.empty(); }
  double length() const;
  double duration() const;
};

Trajectory make_trajectory(std::vector<Point2> waypoints, std::vector<NodeId> nodes, double speed,
                           double start_time);

struct InitialPlan {
  Forest forest;
  Trajectory trajectory;
  TreeBuildReport report;
};

/// Builds the goal tree and the first trajectory from `start`. Throws
/// std::invalid_argument for an occupied start or goal and std::runtime_error
/// when the start has no feasible edge into the tree.
InitialPlan plan_initial(const StaticMap& map, Point2 start, Point2 goal, const PlannerConfig& cfg);

enum class TickKind { kept, replanned, failed };

struct TickOutcome {
  TickKind kind = TickKind::kept;
  RiskModel risk;
  /// Zones the tree was pruned with: the CPR plus any hazard zone that
  /// invalidated a checked path element.
  std::vector<Disc> pruned_zones;
  double wall_seconds = 0.0;
  std::uint64_t work_units = 0;
  int final_l = 0;
  PruneStats prune;
  std::size_t connections = 0;
  bool fallback_used = false;
  std::size_t still_pruned = 0;
};

/// Tick-wise validate / prune / repair / optimise / re-path / reintegrate loop.
class Planner {
 public:
  Planner(const StaticMap& map, Point2 goal, const PlannerConfig& cfg, InitialPlan plan);

  /// `next_waypoint` is the index of the first trajectory waypoint the cobot
  /// has not reached yet.
  TickOutcome tick(Point2 cobot, double cobot_speed, std::span<const ObstacleState> obstacles,
                   std::size_t next_waypoint, double now);

  const Forest& forest() const { return forest_; }
  Forest& forest() { return forest_; }
  const Trajectory& trajectory() const { return trajectory_; }
  /// False after a failed tick until the next successful replan.
  bool has_path() const { return !trajectory_.empty(); }
  Point2 goal() const { return goal_; }
  const PlannerConfig& config() const { return cfg_; }
  RiskParams risk_params() const;

 private:
  bool replan(Point2 cobot, const RiskModel& risk,
              std::optional<std::size_t> violation, std::vector<Point2> polyline, std::size_t next_waypoint,
              double now, TickOutcome& out);

  const StaticMap& map_;
  Point2 goal_;
  PlannerConfig cfg_;
  Forest forest_;
  Trajectory trajectory_;
  Rng rng_;
};

}  // namespace smart
