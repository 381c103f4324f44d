#include "smart/pruning.hpp"

#include <algorithm>

namespace smart {

RiskModel compute_risk(Point2 cobot, double cobot_speed, std::span<const ObstacleState> obstacles,
                       const RiskParams& params) {
  RiskModel risk;
  risk.lrz = Disc{cobot, std::max(cobot_speed * params.t_rh, params.r_min)};
  risk.ohz.reserve(obstacles.size());
  for (const ObstacleState& o : obstacles) {
    HazardZone z{o.id, Disc{o.position, o.speed * params.t_oh + o.radius + params.robot_radius}, false};
    if (params.shrink_entered_zones && point_in_disc(cobot, z.disc)) {
      z.disc.radius = o.radius + params.robot_radius;
      z.reduced = true;
    }
    if (discs_intersect(z.disc, risk.lrz)) {
      risk.cpr.push_back(z.disc);
      risk.danger_ids.push_back(o.id);
    }
    risk.ohz.push_back(z);
  }
  return risk;
}

namespace {

bool point_hits(Point2 p, const RiskModel& risk) {
  return std::any_of(risk.ohz.begin(), risk.ohz.end(), [&](const HazardZone& z) { return point_in_disc(p, z.disc); });
}

bool segment_hits(const Segment2& s, const RiskModel& risk) {
  return std::any_of(risk.ohz.begin(), risk.ohz.end(),
                     [&](const HazardZone& z) { return segment_intersects_disc(s, z.disc); });
}

}  // namespace

std::optional<std::size_t> first_violation(std::span<const Point2> polyline, const RiskModel& risk) {
  for (std::size_t i = 0; i < polyline.size(); ++i) {
    const bool inside = point_in_disc(polyline[i], risk.lrz);
    if (inside && point_hits(polyline[i], risk)) {
      return i;
    }
    if (i + 1 < polyline.size() && (inside || point_in_disc(polyline[i + 1], risk.lrz)) &&
        segment_hits({polyline[i], polyline[i + 1]}, risk)) {
      return i;
    }
  }
  return std::nullopt;
}

bool validate_path(std::span<const NodeId> path, const Forest& forest, const RiskModel& risk) {
  std::vector<Point2> points;
  points.reserve(path.size());
  for (const NodeId n : path) {
    points.push_back(forest.position(n));
  }
  return !first_violation(points, risk).has_value();
}

PruneResult prune(Forest& forest, std::span<const Disc> cpr) {
  PruneResult result;
  forest.reset_labels();
  const NodeId goal = forest.goal_root();
  const Tiling& t = forest.tiling();
  const double grow = t.cell_size();

  std::vector<CellIndex> cover;
  for (const Disc& d : cpr) {
    const double r = d.radius + grow;
    t.cells_in_box({d.center.x - r, d.center.y - r}, {d.center.x + r, d.center.y + r}, cover);
  }
  std::vector<std::size_t> linear;
  linear.reserve(cover.size());
  for (const CellIndex c : cover) {
    linear.push_back(t.linear(c));
  }
  std::sort(linear.begin(), linear.end());
  linear.erase(std::unique(linear.begin(), linear.end()), linear.end());
  result.stats.cells_scanned = linear.size();

  std::vector<NodeId> candidates;
  for (const std::size_t i : linear) {
    const auto& cell = forest.nodes_in_cell(t.from_linear(i));
    candidates.insert(candidates.end(), cell.begin(), cell.end());
  }
  result.stats.nodes_touched = candidates.size();
  std::sort(candidates.begin(), candidates.end());

  auto in_cpr = [&](Point2 p) {
    return std::any_of(cpr.begin(), cpr.end(), [&](const Disc& d) { return point_in_disc(p, d); });
  };
  auto crosses_cpr = [&](Point2 a, Point2 b) {
    return std::any_of(cpr.begin(), cpr.end(), [&](const Disc& d) { return segment_intersects_disc({a, b}, d); });
  };

  std::vector<NodeId> severed;
  for (const NodeId n : candidates) {
    if (n == goal || !in_cpr(forest.position(n))) {
      continue;
    }
    const auto& ch = forest.children(n);
    severed.insert(severed.end(), ch.begin(), ch.end());
    forest.prune_node(n);
    result.pruned.push_back(n);
  }
  result.stats.nodes_pruned = result.pruned.size();

  // Both ends of a crossing edge lie in the grown cover, so checking the
  // parent edge of every surviving candidate finds all of them.
  for (const NodeId n : candidates) {
    if (!forest.active(n)) {
      continue;
    }
    const NodeId p = forest.parent(n);
    if (p != NodeId::none && crosses_cpr(forest.position(n), forest.position(p))) {
      forest.unlink(n);
      severed.push_back(n);
      result.stats.edges_cut++;
    }
  }

  std::sort(severed.begin(), severed.end());
  severed.erase(std::unique(severed.begin(), severed.end()), severed.end());
  result.roots.push_back(goal);
  for (const NodeId n : severed) {
    if (forest.active(n) && forest.parent(n) == NodeId::none) {
      result.roots.push_back(n);
    }
  }
  return result;
}

}  // namespace smart
