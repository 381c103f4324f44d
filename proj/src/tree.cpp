#include "smart/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <stdexcept>
#include <utility>

#include "smart/random.hpp"

namespace smart {

std::vector<NodeId> neighbors(const Forest& forest, Point2 p) {
  std::vector<NodeId> out;
  forest.block_nodes(forest.tiling().cell_of(p), out);
  return out;
}

std::optional<NodeId> nearest_node(const Forest& forest, Point2 p) {
  const Tiling& t = forest.tiling();
  const CellIndex c = t.cell_of(p);
  const int max_ring = std::max(t.cols(), t.rows());
  std::optional<NodeId> best;
  double best_d = kInfinity;
  auto scan = [&](int col, int row) {
    if (!t.in_bounds({col, row})) {
      return;
    }
    for (const NodeId n : forest.nodes_in_cell({col, row})) {
      const double d = distance(p, forest.position(n));
      if (d < best_d || (d == best_d && n < *best)) {
        best_d = d;
        best = n;
      }
    }
  };
  for (int k = 0; k <= max_ring; ++k) {
    if (k == 0) {
      scan(c.col, c.row);
    } else {
      for (int dc = -k; dc <= k; ++dc) {
        scan(c.col + dc, c.row - k);
        scan(c.col + dc, c.row + k);
      }
      for (int dr = -k + 1; dr <= k - 1; ++dr) {
        scan(c.col - k, c.row + dr);
        scan(c.col + k, c.row + dr);
      }
    }
    // Anything in ring k + 1 is at least k cells away.
    if (best && best_d <= k * t.cell_size()) {
      break;
    }
  }
  return best;
}

namespace {

class TreeBuilder {
 public:
  TreeBuilder(const StaticMap& map, Forest& forest, double step)
      : map_(map), forest_(forest), feasible_(map, {}, &forest.work()), step_(step) {}

  // One RRT* extension from the nearest node towards `target`.
  std::optional<NodeId> extend(Point2 target) {
    const auto near = nearest_node(forest_, target);
    if (!near) {
      return std::nullopt;
    }
    const Point2 from = forest_.position(*near);
    const double d = distance(from, target);
    if (d == 0.0) {
      return std::nullopt;
    }
    const Point2 q = d <= step_ ? target : from + (step_ / d) * (target - from);
    if (!map_.free_at(q) || !feasible_(from, q)) {
      return std::nullopt;
    }

    nbrs_.clear();
    forest_.block_nodes(forest_.tiling().cell_of(q), nbrs_);
    NodeId parent = *near;
    double best = forest_.cost(*near) + distance(from, q);
    for (const NodeId m : nbrs_) {
      if (m == *near) {
        continue;
      }
      const double c = forest_.cost(m) + distance(forest_.position(m), q);
      if (c < best && feasible_(forest_.position(m), q)) {
        best = c;
        parent = m;
      }
    }
    const NodeId id = forest_.add_node(q);
    forest_.link(id, parent);
    forest_.set_cost(id, best);
    forest_.set_label(id, kGoalTree);

    for (const NodeId m : nbrs_) {
      if (m == parent) {
        continue;
      }
      const double c = best + distance(q, forest_.position(m));
      if (c < forest_.cost(m) && feasible_(q, forest_.position(m))) {
        forest_.reparent(m, id);
        forest_.set_cost(m, c);
        forest_.propagate_costs(m);
      }
    }
    return id;
  }

 private:
  const StaticMap& map_;
  Forest& forest_;
  EdgeFeasibility feasible_;
  double step_;
  std::vector<NodeId> nbrs_;
};

}  // namespace

Forest build_initial_tree(const StaticMap& map, Point2 goal, const TreeBuildParams& params, TreeBuildReport* report) {
  const Tiling& t = map.tiling();
  if (!map.free_at(goal)) {
    throw std::invalid_argument("goal is outside the workspace or inside a static obstacle");
  }
  if (!(params.step > 0.0) || params.step > t.cell_size()) {
    throw std::invalid_argument("tree step must be in (0, cell_size]");
  }
  Forest forest(t);
  forest.add_goal_root(goal);
  TreeBuilder builder(map, forest, params.step);
  Rng rng(params.seed);
  const Point2 o = t.origin();

  for (std::size_t i = 0; i < params.samples; ++i) {
    const Point2 p{uniform(rng, o.x, o.x + t.width()), uniform(rng, o.y, o.y + t.height())};
    if (!map.free_at(p)) {
      continue;
    }
    builder.extend(p);
  }

  // Coverage: walk towards a random point of every empty free cell.
  for (std::size_t i = 0; i < t.cell_count(); ++i) {
    const CellIndex cell = t.from_linear(i);
    if (map.occupied(cell) || !forest.nodes_in_cell(cell).empty()) {
      continue;
    }
    const Point2 lo = t.cell_min(cell);
    const double hi_x = std::min(lo.x + t.cell_size(), o.x + t.width());
    const double hi_y = std::min(lo.y + t.cell_size(), o.y + t.height());
    bool covered = false;
    for (int attempt = 0; attempt < params.coverage_attempts && !covered; ++attempt) {
      const Point2 q{uniform(rng, lo.x, hi_x), uniform(rng, lo.y, hi_y)};
      if (t.cell_of(q) != cell) {
        continue;
      }
      const int max_steps = static_cast<int>(std::ceil((t.width() + t.height()) / params.step)) + 1;
      for (int s = 0; s < max_steps; ++s) {
        const auto id = builder.extend(q);
        if (!id) {
          break;
        }
        if (forest.cell(*id) == cell) {
          covered = true;
          break;
        }
      }
    }
    if (!covered && report != nullptr) {
      report->uncovered.push_back(cell);
    }
  }

  const NodeId root = forest.goal_root();
  rewire_cascade(forest, map, {}, std::span<const NodeId>(&root, 1));
  return forest;
}

void rewire_cascade(Forest& forest, const StaticMap& map, std::span<const Disc> cpr, std::span<const NodeId> seeds) {
  if (seeds.empty()) {
    return;
  }
  WorkCounter& work = forest.work();
  const EdgeFeasibility feasible(map, cpr, &work);
  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  std::vector<std::uint8_t> reached(forest.size(), 0);

  for (const NodeId s : seeds) {
    if (forest.active(s) && forest.ensure_label(s) == kGoalTree && reached[index(s)] == 0) {
      reached[index(s)] = 1;
      open.emplace(forest.cost(s), s);
    }
  }

  std::vector<NodeId> nbrs;
  while (!open.empty()) {
    const auto [c, n] = open.top();
    open.pop();
    if (c != forest.cost(n)) {
      continue;
    }
    work.node_visits++;
    const Point2 pn = forest.position(n);

    for (const NodeId ch : forest.children(n)) {
      const double nc = c + distance(pn, forest.position(ch));
      if (nc != forest.cost(ch)) {
        forest.set_cost(ch, nc);
        reached[index(ch)] = 1;
        open.emplace(nc, ch);
      } else if (reached[index(ch)] == 0) {
        reached[index(ch)] = 1;
        open.emplace(nc, ch);
      }
    }

    nbrs.clear();
    forest.block_nodes(forest.cell(n), nbrs);
    for (const NodeId m : nbrs) {
      if (m == n || forest.parent(m) == n) {
        continue;
      }
      if (forest.ensure_label(m) != kGoalTree) {
        continue;
      }
      const double cand = c + distance(pn, forest.position(m));
      if (cand < forest.cost(m) && feasible(pn, forest.position(m)) && !forest.is_ancestor(m, n)) {
        forest.reparent(m, n);
        forest.set_cost(m, cand);
        reached[index(m)] = 1;
        open.emplace(cand, m);
      } else if (reached[index(m)] == 0) {
        reached[index(m)] = 1;
        open.emplace(forest.cost(m), m);
      }
    }
  }
}

namespace {

// Goal-tree node of the 3x3 block around p with a feasible edge to p that
// minimises the resulting cost-to-go.
std::optional<NodeId> best_adjacent_goal_node(Forest& forest, Point2 p, const EdgeFeasibility& feasible,
                                              std::vector<NodeId>& scratch) {
  scratch.clear();
  forest.block_nodes(forest.tiling().cell_of(p), scratch);
  std::optional<NodeId> best;
  double best_cost = kInfinity;
  for (const NodeId m : scratch) {
    if (forest.ensure_label(m) != kGoalTree) {
      continue;
    }
    const double c = forest.cost(m) + distance(p, forest.position(m));
    if ((c < best_cost || (c == best_cost && best && m < *best)) && feasible(p, forest.position(m))) {
      best_cost = c;
      best = m;
    }
  }
  return best;
}

}  // namespace

ReintegrateReport reintegrate(Forest& forest, const StaticMap& map, std::span<const Disc> cpr) {
  ReintegrateReport report;
  const EdgeFeasibility feasible(map, cpr, &forest.work());
  std::vector<NodeId> scratch;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const NodeId id : std::vector<NodeId>(forest.pruned().begin(), forest.pruned().end())) {
      const auto best = best_adjacent_goal_node(forest, forest.position(id), feasible, scratch);
      if (!best) {
        continue;
      }
      forest.reactivate(id);
      forest.link(id, *best);
      forest.set_label(id, kGoalTree);
      forest.set_cost(id, forest.cost(*best) + distance(forest.position(id), forest.position(*best)));
      report.reactivated++;
      progress = true;
    }
    for (const NodeId root : std::vector<NodeId>(forest.subtree_roots().begin(), forest.subtree_roots().end())) {
      if (forest.parent(root) != NodeId::none || !forest.active(root)) {
        continue;
      }
      // Try the root first, then the rest of its tree in preorder.
      std::optional<std::pair<NodeId, NodeId>> join;
      std::vector<NodeId> members;
      forest.for_each_in_subtree(root, [&](NodeId n) { members.push_back(n); });
      for (const NodeId n : members) {
        if (const auto best = best_adjacent_goal_node(forest, forest.position(n), feasible, scratch)) {
          join = std::make_pair(n, *best);
          break;
        }
      }
      if (join) {
        forest.graft(join->first, join->second);
        report.subtrees_merged++;
        progress = true;
      }
    }
  }
  report.still_pruned = forest.pruned().size();
  report.still_detached = forest.subtree_roots().size();
  return report;
}

std::optional<NodeId> best_goal_tree_entry(Forest& forest, Point2 p, const EdgeFeasibility& feasible, double radius) {
  const Tiling& t = forest.tiling();
  std::vector<CellIndex> cells;
  t.cells_in_box({p.x - radius, p.y - radius}, {p.x + radius, p.y + radius}, cells);
  std::optional<NodeId> best;
  double best_cost = kInfinity;
  for (const CellIndex c : cells) {
    for (const NodeId m : forest.nodes_in_cell(c)) {
      const Point2 q = forest.position(m);
      const double d = distance(p, q);
      if (d > radius || forest.ensure_label(m) != kGoalTree) {
        continue;
      }
      const double total = d + forest.cost(m);
      if ((total < best_cost || (total == best_cost && best && m < *best)) && feasible(p, q)) {
        best_cost = total;
        best = m;
      }
    }
  }
  return best;
}

}  // namespace smart
