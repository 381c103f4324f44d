#include "smart/repair.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "smart/tree.hpp"

namespace smart {

std::size_t label_subtrees(Forest& forest, std::span<const CellIndex> region) {
  std::vector<int> labels;
  for (const CellIndex c : region) {
    for (const NodeId n : forest.nodes_in_cell(c)) {
      labels.push_back(forest.ensure_label(n));
    }
  }
  std::sort(labels.begin(), labels.end());
  return static_cast<std::size_t>(std::unique(labels.begin(), labels.end()) - labels.begin());
}

namespace {

std::vector<NodeId> sorted_block(const Forest& forest, CellIndex c) {
  std::vector<NodeId> block;
  forest.block_nodes(c, block);
  std::sort(block.begin(), block.end());
  return block;
}

// First pair (a in c, b in the 3x3 block) in ascending id order with different
// labels and a feasible edge.
std::optional<std::pair<NodeId, NodeId>> find_pair(Forest& forest, CellIndex c, const EdgeFeasibility& feasible) {
  const auto& own = forest.nodes_in_cell(c);
  if (own.empty()) {
    return std::nullopt;
  }
  const std::vector<NodeId> block = sorted_block(forest, c);
  for (const NodeId a : own) {
    const int la = forest.ensure_label(a);
    const Point2 pa = forest.position(a);
    for (const NodeId b : block) {
      if (b == a || forest.ensure_label(b) == la) {
        continue;
      }
      if (feasible(pa, forest.position(b))) {
        return std::make_pair(a, b);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

bool is_hotspot(Forest& forest, CellIndex c, const EdgeFeasibility& feasible) {
  return find_pair(forest, c, feasible).has_value();
}

std::vector<int> find_hotspots(Forest& forest, std::span<const CellIndex> region, const EdgeFeasibility& feasible) {
  std::vector<int> out;
  out.reserve(region.size());
  for (const CellIndex c : region) {
    out.push_back(is_hotspot(forest, c, feasible) ? 1 : -1);
  }
  return out;
}

double utility(Forest& forest, CellIndex c, Point2 cobot, Point2 goal) {
  const Point2 centroid = forest.tiling().centroid(c);
  double best = kInfinity;
  for (const NodeId n : forest.nodes_in_cell(c)) {
    if (forest.ensure_label(n) == kGoalTree) {
      best = std::min(best, forest.cost(n));
    }
  }
  const double tail = best < kInfinity ? best : distance(centroid, goal);
  return 1.0 / std::max(distance(cobot, centroid) + tail, 1e-9);
}

int default_l_max(const Tiling& t, CellIndex center) {
  const int half = std::max({center.col, t.cols() - 1 - center.col, center.row, t.rows() - 1 - center.row});
  return std::max(3, 2 * half + 1);
}

namespace {

class RepairEpisode {
 public:
  RepairEpisode(Forest& forest, const StaticMap& map, std::span<const Disc> cpr, Point2 cobot, Point2 goal,
                CellIndex center, const RepairParams& params, Rng& rng)
      : forest_(forest),
        tiling_(forest.tiling()),
        feasible_(map, cpr, &forest.work()),
        cobot_(cobot),
        goal_(goal),
        params_(params),
        rng_(rng),
        radius_(params.connect_radius > 0.0 ? params.connect_radius : 1.5 * forest.tiling().cell_size()) {
    state_.center = center;
    state_.l_max = params.l_max > 0 ? params.l_max : default_l_max(tiling_, center);
    state_.hotspot.assign(tiling_.cell_count(), 0);
    state_.utilities.assign(tiling_.cell_count(), 0.0);
    in_region_.assign(tiling_.cell_count(), 0);
  }

  RepairResult run() {
    if (reachable()) {
      return finish(true);
    }
    while (state_.l + 2 <= state_.l_max) {
      grow();
      while (const auto best = best_hotspot()) {
        if (!connect(*best)) {
          // Only possible if the map is stale; re-evaluate and keep going.
          evaluate(*best);
          continue;
        }
        if (reachable()) {
          return finish(true);
        }
      }
    }
    if (params_.fallback) {
      return finish(sample_fallback());
    }
    return finish(false);
  }

 private:
  bool reachable() {
    result_.connect_node = best_goal_tree_entry(forest_, cobot_, feasible_, radius_);
    return result_.connect_node.has_value();
  }

  RepairResult finish(bool success) {
    result_.success = success;
    result_.final_l = state_.l;
    result_.seeds = state_.seeds;
    if (!success) {
      result_.connect_node.reset();
    }
    return std::move(result_);
  }

  void evaluate(CellIndex c) {
    const std::size_t i = tiling_.linear(c);
    const bool hot = is_hotspot(forest_, c, feasible_);
    state_.hotspot[i] = hot ? 1 : -1;
    state_.utilities[i] = hot ? utility(forest_, c, cobot_, goal_) : 0.0;
  }

  void notify() {
    if (params_.on_refresh) {
      params_.on_refresh(state_, forest_);
    }
  }

  // Hot-spot status only depends on the 3x3 block, so widening the window
  // leaves old cells valid and only the new ring is evaluated.
  void grow() {
    state_.l += 2;
    state_.region = tiling_.neighborhood(state_.center, state_.l);
    std::vector<CellIndex> fresh;
    for (const CellIndex c : state_.region) {
      if (in_region_[tiling_.linear(c)] == 0) {
        in_region_[tiling_.linear(c)] = 1;
        fresh.push_back(c);
      }
    }
    label_subtrees(forest_, fresh);
    for (const CellIndex c : fresh) {
      evaluate(c);
    }
    notify();
  }

  std::optional<CellIndex> best_hotspot() const {
    std::optional<CellIndex> best;
    double best_u = 0.0;
    // Region is row-major, so the strict comparison keeps the lower index on ties.
    for (const CellIndex c : state_.region) {
      const std::size_t i = tiling_.linear(c);
      if (state_.hotspot[i] == 1 && (!best || state_.utilities[i] > best_u)) {
        best = c;
        best_u = state_.utilities[i];
      }
    }
    return best;
  }

  bool connect(CellIndex c) {
    const auto pair = find_pair(forest_, c, feasible_);
    if (!pair) {
      return false;
    }
    const auto [a, b] = *pair;
    const int la = forest_.ensure_label(a);
    const int lb = forest_.ensure_label(b);
    NodeId parent;
    NodeId child;
    bool into_goal = false;
    if (la == kGoalTree || lb == kGoalTree) {
      parent = la == kGoalTree ? a : b;
      child = la == kGoalTree ? b : a;
      into_goal = true;
    } else {
      const double ua = utility(forest_, forest_.cell(a), cobot_, goal_);
      const double ub = utility(forest_, forest_.cell(b), cobot_, goal_);
      parent = ua > ub ? a : ub > ua ? b : std::min(a, b);
      child = parent == a ? b : a;
    }
    std::vector<NodeId> relabeled;
    forest_.graft(child, parent, &relabeled);
    result_.connections.push_back({parent, child, into_goal});
    if (into_goal) {
      state_.seeds.push_back(child);
    }
    refresh(relabeled);
    notify();
    return true;
  }

  // Re-evaluates the window cells whose 3x3 block holds a relabelled node.
  void refresh(const std::vector<NodeId>& relabeled) {
    std::vector<std::uint8_t> dirty(tiling_.cell_count(), 0);
    std::vector<std::size_t> order;
    for (const NodeId n : relabeled) {
      for (const CellIndex c : tiling_.neighborhood(forest_.cell(n), 3)) {
        const std::size_t i = tiling_.linear(c);
        if (in_region_[i] != 0 && dirty[i] == 0) {
          dirty[i] = 1;
          order.push_back(i);
        }
      }
    }
    std::sort(order.begin(), order.end());
    for (const std::size_t i : order) {
      evaluate(tiling_.from_linear(i));
    }
  }

  // Random samples outside the CPR that join at least two trees, or join one
  // while lying within reach of the cobot.
  bool sample_fallback() {
    result_.fallback_used = true;
    const Point2 o = tiling_.origin();
    std::vector<NodeId> block;
    for (std::size_t s = 0; s < params_.fallback_samples; ++s) {
      result_.fallback_samples++;
      const Point2 q{uniform(rng_, o.x, o.x + tiling_.width()), uniform(rng_, o.y, o.y + tiling_.height())};
      if (!feasible_.point_free(q)) {
        continue;
      }
      block.clear();
      forest_.block_nodes(tiling_.cell_of(q), block);
      std::sort(block.begin(), block.end());
      std::map<int, std::pair<double, NodeId>> best;
      for (const NodeId m : block) {
        const int lm = forest_.ensure_label(m);
        const double d = distance(q, forest_.position(m));
        const double score = lm == kGoalTree ? d + forest_.cost(m) : d;
        const auto it = best.find(lm);
        if ((it == best.end() || score < it->second.first) && feasible_(q, forest_.position(m))) {
          best[lm] = {score, m};
        }
      }
      const bool near = distance(q, cobot_) <= radius_;
      if (best.size() < 2 && !(near && best.size() == 1)) {
        continue;
      }
      const NodeId id = forest_.add_node(q);
      result_.fallback_nodes++;
      const NodeId anchor = best.begin()->second.second;
      const int anchor_label = best.begin()->first;
      forest_.link(id, anchor);
      forest_.set_label(id, anchor_label);
      if (anchor_label == kGoalTree) {
        forest_.set_cost(id, forest_.cost(anchor) + distance(q, forest_.position(anchor)));
        state_.seeds.push_back(id);
      }
      for (auto it = std::next(best.begin()); it != best.end(); ++it) {
        forest_.graft(it->second.second, id);
        result_.connections.push_back({id, it->second.second, anchor_label == kGoalTree});
        if (anchor_label == kGoalTree) {
          state_.seeds.push_back(it->second.second);
        }
      }
      if (reachable()) {
        return true;
      }
    }
    return false;
  }

  Forest& forest_;
  const Tiling& tiling_;
  EdgeFeasibility feasible_;
  Point2 cobot_;
  Point2 goal_;
  const RepairParams& params_;
  Rng& rng_;
  double radius_;
  RepairState state_;
  RepairResult result_;
  std::vector<std::uint8_t> in_region_;
};

}  // namespace

RepairResult repair(Forest& forest, const StaticMap& map, std::span<const Disc> cpr, Point2 cobot, Point2 goal,
                    CellIndex center, const RepairParams& params, Rng& rng) {
  return RepairEpisode(forest, map, cpr, cobot, goal, center, params, rng).run();
}

}  // namespace smart
