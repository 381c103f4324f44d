#include "smart/forest.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <stdexcept>

namespace smart {

Forest::Forest(const Tiling& tiling) : tiling_(tiling), registry_(tiling.cell_count()) {}

NodeId Forest::add_goal_root(Point2 goal) {
  if (goal_ != NodeId::none) {
    throw std::logic_error("forest already has a goal root");
  }
  goal_ = add_node(goal);
  roots_.erase(goal_);
  nodes_[index(goal_)].cost_to_go = 0.0;
  set_label(goal_, kGoalTree);
  return goal_;
}

NodeId Forest::add_node(Point2 p) {
  const NodeId id = node_id(nodes_.size());
  Node n;
  n.position = p;
  n.cell = tiling_.cell_of(p);
  nodes_.push_back(std::move(n));
  labels_.push_back(kUnlabeled);
  label_epoch_.push_back(0);
  registry_[tiling_.linear(nodes_.back().cell)].push_back(id);
  roots_.insert(id);
  return id;
}

void Forest::block_nodes(CellIndex c, std::vector<NodeId>& out) const {
  const int r0 = std::max(c.row - 1, 0), r1 = std::min(c.row + 1, tiling_.rows() - 1);
  const int c0 = std::max(c.col - 1, 0), c1 = std::min(c.col + 1, tiling_.cols() - 1);
  for (int r = r0; r <= r1; ++r) {
    for (int k = c0; k <= c1; ++k) {
      const auto& cell = registry_[tiling_.linear({k, r})];
      out.insert(out.end(), cell.begin(), cell.end());
    }
  }
}

void Forest::register_node(NodeId id) {
  auto& cell = registry_[tiling_.linear(nodes_[index(id)].cell)];
  cell.insert(std::lower_bound(cell.begin(), cell.end(), id), id);
}

void Forest::unregister_node(NodeId id) {
  auto& cell = registry_[tiling_.linear(nodes_[index(id)].cell)];
  const auto it = std::lower_bound(cell.begin(), cell.end(), id);
  if (it != cell.end() && *it == id) {
    cell.erase(it);
  }
}

void Forest::detach_from_parent(NodeId child) {
  Node& c = nodes_[index(child)];
  if (c.parent == NodeId::none) {
    return;
  }
  auto& siblings = nodes_[index(c.parent)].children;
  siblings.erase(std::find(siblings.begin(), siblings.end(), child));
  c.parent = NodeId::none;
}

void Forest::link(NodeId child, NodeId parent) {
  Node& c = nodes_[index(child)];
  const Node& p = nodes_[index(parent)];
  if (c.parent != NodeId::none || child == goal_) {
    throw std::logic_error("link: child already has a parent");
  }
  if (c.status != NodeStatus::active || p.status != NodeStatus::active) {
    throw std::logic_error("link: both endpoints must be active");
  }
  assert(std::abs(c.cell.col - p.cell.col) <= 1 && std::abs(c.cell.row - p.cell.row) <= 1);
  c.parent = parent;
  nodes_[index(parent)].children.push_back(child);
  roots_.erase(child);
}

void Forest::unlink(NodeId child) {
  if (nodes_[index(child)].parent == NodeId::none) {
    return;
  }
  detach_from_parent(child);
  if (nodes_[index(child)].status == NodeStatus::active && child != goal_) {
    roots_.insert(child);
  }
}

void Forest::reparent(NodeId child, NodeId parent) {
  detach_from_parent(child);
  Node& c = nodes_[index(child)];
  assert(std::abs(c.cell.col - nodes_[index(parent)].cell.col) <= 1 &&
         std::abs(c.cell.row - nodes_[index(parent)].cell.row) <= 1);
  c.parent = parent;
  nodes_[index(parent)].children.push_back(child);
  roots_.erase(child);
}

void Forest::prune_node(NodeId id) {
  Node& n = nodes_[index(id)];
  if (n.status == NodeStatus::pruned) {
    return;
  }
  unlink(id);
  for (const NodeId c : std::vector<NodeId>(n.children)) {
    unlink(c);
  }
  n.status = NodeStatus::pruned;
  unregister_node(id);
  roots_.erase(id);
  pruned_.insert(id);
  labels_[index(id)] = kUnlabeled;
}

void Forest::reactivate(NodeId id) {
  Node& n = nodes_[index(id)];
  if (n.status == NodeStatus::active) {
    return;
  }
  n.status = NodeStatus::active;
  pruned_.erase(id);
  register_node(id);
  roots_.insert(id);
}

void Forest::reroot(NodeId id) {
  std::vector<NodeId> chain{id};
  while (nodes_[index(chain.back())].parent != NodeId::none) {
    chain.push_back(nodes_[index(chain.back())].parent);
    work_.node_visits++;
  }
  if (chain.size() == 1) {
    return;
  }
  if (chain.back() == goal_) {
    throw std::logic_error("reroot: the goal tree cannot be re-rooted");
  }
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    detach_from_parent(chain[i]);
  }
  for (std::size_t i = chain.size() - 1; i > 0; --i) {
    Node& c = nodes_[index(chain[i])];
    c.parent = chain[i - 1];
    nodes_[index(chain[i - 1])].children.push_back(chain[i]);
  }
  roots_.erase(chain.back());
  roots_.insert(id);
}

void Forest::graft(NodeId id, NodeId new_parent, std::vector<NodeId>* visited) {
  assert(find_root(id) != find_root(new_parent));
  reroot(id);
  link(id, new_parent);
  const int lab = label(new_parent);
  const bool goal_tree = lab == kGoalTree;
  for_each_in_subtree(id, [&](NodeId n) {
    work_.node_visits++;
    set_label(n, lab);
    Node& node = nodes_[index(n)];
    node.cost_to_go = goal_tree ? nodes_[index(node.parent)].cost_to_go + distance(node.position, position(node.parent))
                                : kInfinity;
    if (visited != nullptr) {
      visited->push_back(n);
    }
  });
}

void Forest::propagate_costs(NodeId id) {
  for_each_in_subtree(id, [&](NodeId n) {
    work_.node_visits++;
    if (n == id) {
      return;
    }
    Node& node = nodes_[index(n)];
    node.cost_to_go = nodes_[index(node.parent)].cost_to_go + distance(node.position, position(node.parent));
  });
}

NodeId Forest::find_root(NodeId id) const {
  std::size_t steps = 0;
  while (nodes_[index(id)].parent != NodeId::none) {
    id = nodes_[index(id)].parent;
    if (++steps > nodes_.size()) {
      throw std::logic_error("cycle in parent links");
    }
  }
  return id;
}

bool Forest::is_ancestor(NodeId ancestor, NodeId id) const {
  for (NodeId cur = id; cur != NodeId::none; cur = nodes_[index(cur)].parent) {
    if (cur == ancestor) {
      return true;
    }
  }
  return false;
}

void Forest::reset_labels() {
  ++epoch_;
  next_label_ = 1;
  if (goal_ != NodeId::none) {
    set_label(goal_, kGoalTree);
  }
}

void Forest::set_label(NodeId id, int lab) {
  labels_[index(id)] = lab;
  label_epoch_[index(id)] = epoch_;
}

int Forest::ensure_label(NodeId id) {
  if (nodes_[index(id)].status != NodeStatus::active) {
    return kUnlabeled;
  }
  if (const int l = label(id); l != kUnlabeled) {
    return l;
  }
  std::vector<NodeId> chain;
  NodeId cur = id;
  int lab = kUnlabeled;
  while (true) {
    work_.node_visits++;
    if (const int l = label(cur); l != kUnlabeled) {
      lab = l;
      break;
    }
    chain.push_back(cur);
    const NodeId p = nodes_[index(cur)].parent;
    if (p == NodeId::none) {
      lab = cur == goal_ ? kGoalTree : next_label_++;
      break;
    }
    if (chain.size() > nodes_.size()) {
      throw std::logic_error("cycle in parent links");
    }
    cur = p;
  }
  for (const NodeId n : chain) {
    set_label(n, lab);
  }
  return lab;
}

}  // namespace smart
