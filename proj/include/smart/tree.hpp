#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "smart/feasibility.hpp"
#include "smart/forest.hpp"
#include "smart/world.hpp"

namespace smart {

struct TreeBuildParams {
  std::size_t samples = 2048;
  /// Steering step; must not exceed the cell size so edges stay within 3x3 blocks.
  double step = 1.0;
  std::uint64_t seed = 1;
  int coverage_attempts = 20;
};

struct TreeBuildReport {
  /// Free cells left without a node after the coverage pass.
  std::vector<CellIndex> uncovered;
};

/// RRT* tree rooted at the goal, grown with 3x3-cell neighbourhoods, followed
/// by a coverage pass that puts at least one node into every reachable free
/// cell and a final shortest-path rewiring over the neighbour graph.
/// Throws std::invalid_argument when the goal is not in a free cell.
Forest build_initial_tree(const StaticMap& map, Point2 goal, const TreeBuildParams& params,
                          TreeBuildReport* report = nullptr);

/// Active nodes in the cell of p and its 8 neighbours.
std::vector<NodeId> neighbors(const Forest& forest, Point2 p);

/// Nearest active node by Euclidean distance (ring search over cells).
std::optional<NodeId> nearest_node(const Forest& forest, Point2 p);

/// Priority-ordered relaxation of the goal tree starting from `seeds`.
///
/// Every goal-tree node connected to a seed through feasible neighbour edges
/// is expanded at least once and again whenever its cost drops, so on return
/// cost_to_go is the shortest feasible distance to the goal over the goal
/// tree's neighbour graph and parent links realise those paths.
void rewire_cascade(Forest& forest, const StaticMap& map, std::span<const Disc> cpr, std::span<const NodeId> seeds);

struct ReintegrateReport {
  std::size_t reactivated = 0;
  std::size_t subtrees_merged = 0;
  std::size_t still_pruned = 0;
  std::size_t still_detached = 0;
};

/// Returns pruned nodes and leftover subtrees to the goal tree wherever a
/// feasible edge to an adjacent goal-tree node exists, choosing the attachment
/// that minimises the resulting cost-to-go.
ReintegrateReport reintegrate(Forest& forest, const StaticMap& map, std::span<const Disc> cpr);

/// Goal-tree node within `radius` of p with a feasible straight edge,
/// minimising edge length plus cost-to-go. Ties go to the lower id.
std::optional<NodeId> best_goal_tree_entry(Forest& forest, Point2 p, const EdgeFeasibility& feasible, double radius);

}  // namespace smart
