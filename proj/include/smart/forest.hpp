#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <vector>

#include "smart/geometry.hpp"
#include "smart/work.hpp"
#include "smart/world.hpp"

namespace smart {

/// Stable node handle. Ids are dense, assigned in creation order and never reused.
enum class NodeId : std::int32_t { none = -1 };

inline std::size_t index(NodeId id) { return static_cast<std::size_t>(id); }
inline NodeId node_id(std::size_t i) { return static_cast<NodeId>(static_cast<std::int32_t>(i)); }

enum class NodeStatus : std::uint8_t { active, pruned };

inline constexpr int kUnlabeled = -1;
inline constexpr int kGoalTree = 0;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Node {
  Point2 position;
  NodeId parent = NodeId::none;
  std::vector<NodeId> children;
  CellIndex cell;
  NodeStatus status = NodeStatus::active;
  double cost_to_go = kInfinity;
};

/// Node store for the goal-rooted tree and the disjoint subtrees that pruning
/// leaves behind.
///
/// Every active node is registered in the cell that contains it. Edges only
/// join nodes of the same or 8-adjacent cells, which keeps every neighbour
/// query and every edge check local to a 3x3 block.
///
/// Tree indices are computed lazily. reset_labels() invalidates all of them in
/// O(1); ensure_label() backtracks towards the root until it meets a labelled
/// ancestor or the root, then labels the whole visited chain.
class Forest {
 public:
  explicit Forest(const Tiling& tiling);

  const Tiling& tiling() const { return tiling_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t active_count() const { return nodes_.size() - pruned_.size(); }

  NodeId goal_root() const { return goal_; }

  /// Creates the goal root (cost 0, label 0). Only valid once.
  NodeId add_goal_root(Point2 goal);
  /// Creates an active parentless node.
  NodeId add_node(Point2 p);

  const Node& node(NodeId id) const { return nodes_[index(id)]; }
  Point2 position(NodeId id) const { return nodes_[index(id)].position; }
  NodeId parent(NodeId id) const { return nodes_[index(id)].parent; }
  const std::vector<NodeId>& children(NodeId id) const { return nodes_[index(id)].children; }
  double cost(NodeId id) const { return nodes_[index(id)].cost_to_go; }
  void set_cost(NodeId id, double c) { nodes_[index(id)].cost_to_go = c; }
  bool active(NodeId id) const { return nodes_[index(id)].status == NodeStatus::active; }
  CellIndex cell(NodeId id) const { return nodes_[index(id)].cell; }

  /// Active nodes registered in c, in ascending id order.
  const std::vector<NodeId>& nodes_in_cell(CellIndex c) const { return registry_[tiling_.linear(c)]; }

  /// Appends the active nodes of the 3x3 block around c.
  void block_nodes(CellIndex c, std::vector<NodeId>& out) const;

  /// Makes `child` (parentless, active) a child of `parent`.
  void link(NodeId child, NodeId parent);
  /// Removes the edge to the parent; the child becomes a subtree root.
  void unlink(NodeId child);
  /// Moves `child` under `parent` without passing through the root set.
  void reparent(NodeId child, NodeId parent);
  /// Marks the node pruned and removes all of its edges.
  void prune_node(NodeId id);
  /// Returns a pruned node to the active set as a parentless node.
  void reactivate(NodeId id);
  /// Reverses the parent chain above `id` so that it becomes its tree's root.
  void reroot(NodeId id);

  /// Re-roots the tree of `id` at `id`, hangs it under `new_parent` and gives
  /// every node of the joined tree the label of `new_parent`. Costs are made
  /// consistent when that label is the goal tree and reset to infinity
  /// otherwise. Visited nodes are appended to `visited` when provided.
  void graft(NodeId id, NodeId new_parent, std::vector<NodeId>* visited = nullptr);

  /// Recomputes cost_to_go below `id` from its current cost.
  void propagate_costs(NodeId id);

  NodeId find_root(NodeId id) const;
  bool is_ancestor(NodeId ancestor, NodeId id) const;

  /// Preorder walk of the subtree rooted at id.
  template <typename Fn>
  void for_each_in_subtree(NodeId id, Fn&& fn) const {
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
      const NodeId n = stack.back();
      stack.pop_back();
      fn(n);
      const auto& ch = nodes_[index(n)].children;
      stack.insert(stack.end(), ch.rbegin(), ch.rend());
    }
  }

  void reset_labels();
  int label(NodeId id) const {
    return label_epoch_[index(id)] == epoch_ ? labels_[index(id)] : kUnlabeled;
  }
  int ensure_label(NodeId id);
  void set_label(NodeId id, int label);
  int fresh_label() { return next_label_++; }

  /// Pruned nodes (status == pruned).
  const std::set<NodeId>& pruned() const { return pruned_; }
  /// Active parentless nodes other than the goal root.
  const std::set<NodeId>& subtree_roots() const { return roots_; }

  WorkCounter& work() const { return work_; }

 private:
  void register_node(NodeId id);
  void unregister_node(NodeId id);
  void detach_from_parent(NodeId child);

  Tiling tiling_;
  std::vector<Node> nodes_;
  std::vector<std::vector<NodeId>> registry_;
  std::vector<int> labels_;
  std::vector<std::uint32_t> label_epoch_;
  std::uint32_t epoch_ = 1;
  int next_label_ = 1;
  NodeId goal_ = NodeId::none;
  std::set<NodeId> pruned_;
  std::set<NodeId> roots_;
  mutable WorkCounter work_;
};

}  // namespace smart
