#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. None of these call into the planning stages under test; they only
// read Forest state and use plain geometry.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smart/forest.hpp"
#include "smart/geometry.hpp"
#include "smart/random.hpp"
#include "smart/world.hpp"

namespace smart::testing {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);
  std::size_t components() const { return components_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> rank_;
  std::size_t components_;
};

/// Straight-edge check written from scratch: disc clearance by sampling the
/// closest point analytically, static cells through the map's supercover.
bool edge_ok(const StaticMap& map, std::span<const Disc> cpr, Point2 a, Point2 b);
bool in_any_disc(std::span<const Disc> discs, Point2 p);
bool chebyshev_adjacent(CellIndex a, CellIndex b);

/// Root reached by following parent links; NodeId::none on a cycle.
NodeId walk_root(const Forest& f, NodeId id);
bool in_goal_tree(const Forest& f, NodeId id);

/// Cost recomputed along the parent chain, summed from the goal outwards.
double chain_cost(const Forest& f, NodeId id);

/// Active nodes whose position falls in c, found by scanning every node.
std::vector<NodeId> brute_nodes_in_cell(const Forest& f, CellIndex c);

/// Shortest distances to the goal root over active nodes accepted by
/// `allowed` (all active nodes when empty). Edges join nodes of the same or
/// adjacent cells whose straight edge passes edge_ok. O(n^2).
std::vector<double> dijkstra_to_goal(const Forest& f, const StaticMap& map, std::span<const Disc> cpr,
                                     std::span<const std::uint8_t> allowed = {});

/// True when some active node within `radius` of `cobot` with a clear edge
/// from the cobot reaches the goal root over the alive-node neighbour graph.
bool oracle_reachable(const Forest& f, const StaticMap& map, std::span<const Disc> cpr, Point2 cobot,
                      double radius);

/// Hot-spot definition evaluated pair by pair with labels taken from parent
/// walks.
bool brute_hotspot(const Forest& f, const StaticMap& map, std::span<const Disc> cpr, CellIndex c);

/// Structural invariants; returns one message per violation.
std::vector<std::string> forest_violations(const Forest& f, double cost_tol = 1e-9);

struct InstanceShape {
  int cols = 8;
  int rows = 8;
  double cell = 1.0;
  int nodes = 60;
  double occupied_fraction = 0.0;
};

struct Instance {
  StaticMap map;
  Forest forest;
  Point2 goal;
};

/// Random goal-rooted tree: every node hangs under a uniformly chosen node of
/// its 3x3 block with a statically clear edge. Costs are consistent along the
/// tree but generally not shortest.
Instance random_instance(Rng& rng, const InstanceShape& shape);

Point2 random_free_point(Rng& rng, const StaticMap& map);

std::vector<Disc> random_discs(Rng& rng, const Tiling& t, int count, double r_lo, double r_hi);

}  // namespace smart::testing
