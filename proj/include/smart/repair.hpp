#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "smart/feasibility.hpp"
#include "smart/forest.hpp"
#include "smart/random.hpp"
#include "smart/world.hpp"

namespace smart {

/// Labels every active node of `region` by backtracking. Returns the number of
/// distinct labels found in the region.
std::size_t label_subtrees(Forest& forest, std::span<const CellIndex> region);

/// Hot-spot test for one cell: some node of c and some node of c or an
/// 8-adjacent cell carry different tree labels and admit a feasible edge.
bool is_hotspot(Forest& forest, CellIndex c, const EdgeFeasibility& feasible);

/// Hot-spot value (1 or -1) for every cell of `region`, in region order.
std::vector<int> find_hotspots(Forest& forest, std::span<const CellIndex> region, const EdgeFeasibility& feasible);

/// Cell ranking: inverse of (cobot to centroid) plus either the smallest goal
/// tree cost-to-go in the cell or, without goal-tree nodes, centroid to goal.
/// The denominator is floored at 1e-9.
double utility(Forest& forest, CellIndex c, Point2 cobot, Point2 goal);

/// Search window and hot-spot bookkeeping of one repair episode.
struct RepairState {
  CellIndex center;
  int l = 1;
  int l_max = 1;
  std::vector<CellIndex> region;
  /// Per-cell values over the whole tiling (row-major); 0 outside the region.
  std::vector<int> hotspot;
  std::vector<double> utilities;
  std::vector<NodeId> seeds;
};

struct RepairParams {
  /// Largest window size; 0 picks the smallest odd size that covers the tiling.
  int l_max = 0;
  /// Reach of the cobot's straight entry edge into the goal tree; 0 means
  /// 1.5 cells.
  double connect_radius = 0.0;
  std::size_t fallback_samples = 2000;
  bool fallback = true;
  /// Called after the hot-spot map has been refreshed (window opened, grown or
  /// updated after a connection).
  std::function<void(const RepairState&, Forest&)> on_refresh;
};

struct Connection {
  NodeId parent;
  NodeId child;
  bool into_goal_tree = false;
};

struct RepairResult {
  bool success = false;
  /// Nodes at which another tree joined the goal tree.
  std::vector<NodeId> seeds;
  std::optional<NodeId> connect_node;
  int final_l = 0;
  std::vector<Connection> connections;
  bool fallback_used = false;
  std::size_t fallback_samples = 0;
  std::size_t fallback_nodes = 0;
};

int default_l_max(const Tiling& t, CellIndex center);

/// Informed repair around `center`: grows an odd window from 3 cells, joins
/// disjoint trees across the best ranked hot-spots until the goal tree is
/// reachable from the cobot, then falls back to random sampling once the
/// window limit is passed.
RepairResult repair(Forest& forest, const StaticMap& map, std::span<const Disc> cpr, Point2 cobot, Point2 goal,
                    CellIndex center, const RepairParams& params, Rng& rng);

}  // namespace smart
