#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smart/geometry.hpp"
#include "smart/sim.hpp"
#include "smart/world.hpp"

namespace smart {

/// Line-oriented text trace of one trial.
///
///   SMART-TRACE 1
///   WORKSPACE ox oy width height cell_size
///   STATIC col row                 (one per occupied cell)
///   ROBOT radius
///   GOAL x y node_id
///   NODE id x y                    (initial tree, then new nodes)
///   EDGE+ child parent / EDGE- child parent
///   PRUNED id / ACTIVE id          (node status changes)
///   PATH t x1 y1 x2 y2 ...
///   TICK t x y                     (true cobot position, once per tick)
///   OBS id x y radius
///   LRZ x y r / OHZ id x y r / CPR x y r
///   REPLAN t duration_ms l_final / FAIL t duration_ms
///   RESULT success collision timeout travel_time
///
/// Records after a TICK line belong to that tick; tree deltas describe the
/// forest after the tick's planning step.
class TraceWriter : public TrialObserver {
 public:
  TraceWriter(std::ostream& out, ReplanClock clock);

  void on_start(const ScenarioConfig& cfg, const Planner& planner, std::span<const SimObstacle> obstacles) override;
  void on_tick(double t, Point2 cobot, std::span<const SimObstacle> obstacles, const TickOutcome& outcome,
               const Planner& planner) override;
  void on_finish(const TrialResult& result) override;

 private:
  void write_tree_delta(const Forest& forest);
  void write_path(double t, const Trajectory& traj);

  std::ostream& out_;
  ReplanClock clock_;
  std::vector<NodeId> parents_;
  std::vector<bool> active_;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceObstacle {
  int id = 0;
  Point2 position;
  double radius = 0.0;
};

struct TraceZone {
  int id = -1;
  Disc disc;
};

struct TraceNodeDelta {
  enum class Kind { add, link, unlink, prune, activate } kind;
  int node = 0;
  int other = -1;
  Point2 position;
};

struct TraceTick {
  double t = 0.0;
  Point2 cobot;
  std::vector<TraceObstacle> obstacles;
  std::optional<Disc> lrz;
  std::vector<TraceZone> ohz;
  std::vector<Disc> cpr;
  bool replanned = false;
  bool failed = false;
  double duration_ms = 0.0;
  int l_final = 0;
  std::optional<std::vector<Point2>> path;
  std::vector<TraceNodeDelta> deltas;
};

struct TraceData {
  Point2 origin;
  double width = 0.0;
  double height = 0.0;
  double cell_size = 1.0;
  std::vector<CellIndex> static_cells;
  double robot_radius = 0.0;
  Point2 goal;
  int goal_node = 0;
  /// Initial tree and path.
  std::vector<TraceNodeDelta> initial;
  std::vector<Point2> initial_path;
  std::vector<TraceTick> ticks;
  std::optional<std::string> result;
};

/// Throws TraceError with a line number on malformed input.
TraceData read_trace(std::istream& in);

/// Tree state after replaying the deltas up to and including tick `index`.
struct TreeSnapshot {
  std::vector<Point2> positions;
  std::vector<int> parents;
  std::vector<bool> active;
  /// 0 for the goal tree, 1.. for other trees by ascending root id, -1 for
  /// pruned nodes.
  std::vector<int> tree_index;
  std::vector<Point2> path;
};

/// Throws TraceError when the tick index is out of range.
TreeSnapshot replay(const TraceData& trace, std::size_t index);

}  // namespace smart
