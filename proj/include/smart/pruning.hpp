#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "smart/forest.hpp"
#include "smart/geometry.hpp"

namespace smart {

struct ObstacleState {
  int id = 0;
  Point2 position;
  double speed = 0.0;
  double radius = 0.5;
};

struct HazardZone {
  int obstacle_id = 0;
  Disc disc;
  /// The cobot stood inside the full zone, so only the physical disc is kept.
  bool reduced = false;
};

struct RiskParams {
  double t_rh = 0.8;
  double t_oh = 0.4;
  double robot_radius = 0.5;
  double r_min = 1.0;
  /// Replace a hazard zone that already contains the cobot by the obstacle's
  /// physical disc (obstacle radius + robot radius).
  bool shrink_entered_zones = true;
};

struct RiskModel {
  Disc lrz;
  std::vector<HazardZone> ohz;
  /// Zones that intersect the LRZ, in obstacle order.
  std::vector<Disc> cpr;
  std::vector<int> danger_ids;
};

RiskModel compute_risk(Point2 cobot, double cobot_speed, std::span<const ObstacleState> obstacles,
                       const RiskParams& params);

/// Index of the first waypoint i such that waypoint i, or the segment from i to
/// i + 1, violates a hazard zone inside the LRZ. Elements with no endpoint in
/// the LRZ are ignored.
std::optional<std::size_t> first_violation(std::span<const Point2> polyline, const RiskModel& risk);

/// Path given as node ids, cobot side first.
bool validate_path(std::span<const NodeId> path, const Forest& forest, const RiskModel& risk);

struct PruneStats {
  /// Registered nodes inspected while scanning the cover cells.
  std::size_t nodes_touched = 0;
  std::size_t cells_scanned = 0;
  std::size_t nodes_pruned = 0;
  /// Edges removed although both endpoints survived.
  std::size_t edges_cut = 0;
};

struct PruneResult {
  /// Goal root followed by every node whose parent link was severed, ascending.
  std::vector<NodeId> roots;
  /// Nodes pruned by this call, ascending.
  std::vector<NodeId> pruned;
  PruneStats stats;
};

/// Removes every node inside a CPR disc and every edge crossing one. Only
/// cells of the discs' bounding boxes, grown by one cell, are scanned. The goal
/// root is never pruned. Tree labels are reset.
PruneResult prune(Forest& forest, std::span<const Disc> cpr);

}  // namespace smart
