#include "smart/planner.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace smart {

void validate(const PlannerConfig& cfg) {
  if (!(cfg.t_rh > 0.0) || !(cfg.t_oh >= 0.0) || !(cfg.robot_radius > 0.0) || !(cfg.v_r > 0.0)) {
    throw std::invalid_argument("planner horizons, speed and robot radius must be positive");
  }
  if (cfg.r_min < 0.0 || cfg.connect_radius < 0.0 || cfg.tree_step < 0.0) {
    throw std::invalid_argument("planner radii must not be negative");
  }
  if (cfg.l_max != 0 && (cfg.l_max < 1 || cfg.l_max % 2 == 0)) {
    throw std::invalid_argument("l_max must be odd");
  }
}

double Trajectory::length() const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    total += distance(waypoints[i], waypoints[i + 1]);
  }
  return total;
}

double Trajectory::duration() const { return std::accumulate(segment_times.begin(), segment_times.end(), 0.0); }

Trajectory make_trajectory(std::vector<Point2> waypoints, std::vector<NodeId> nodes, double speed,
                           double start_time) {
  Trajectory t;
  t.start_time = start_time;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    t.segment_times.push_back(distance(waypoints[i], waypoints[i + 1]) / speed);
  }
  t.waypoints = std::move(waypoints);
  t.nodes = std::move(nodes);
  return t;
}

namespace {

double connect_radius(const PlannerConfig& cfg, const Tiling& t) {
  return cfg.connect_radius > 0.0 ? cfg.connect_radius : 1.5 * t.cell_size();
}

Trajectory path_from(const Forest& forest, Point2 cobot, NodeId entry, double speed, double now) {
  std::vector<Point2> points{cobot};
  std::vector<NodeId> nodes{NodeId::none};
  for (NodeId n = entry; n != NodeId::none; n = forest.parent(n)) {
    points.push_back(forest.position(n));
    nodes.push_back(n);
  }
  return make_trajectory(std::move(points), std::move(nodes), speed, now);
}

// Hazard zones that touch any element the validator looks at.
std::vector<std::size_t> offending_zones(std::span<const Point2> poly, const RiskModel& risk) {
  std::vector<std::size_t> out;
  for (std::size_t z = 0; z < risk.ohz.size(); ++z) {
    const Disc& d = risk.ohz[z].disc;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const bool inside = point_in_disc(poly[i], risk.lrz);
      const bool node_hit = inside && point_in_disc(poly[i], d);
      const bool edge_hit = i + 1 < poly.size() && (inside || point_in_disc(poly[i + 1], risk.lrz)) &&
                            segment_intersects_disc({poly[i], poly[i + 1]}, d);
      if (node_hit || edge_hit) {
        out.push_back(z);
        break;
      }
    }
  }
  return out;
}

}  // namespace

InitialPlan plan_initial(const StaticMap& map, Point2 start, Point2 goal, const PlannerConfig& cfg) {
  validate(cfg);
  if (!map.free_at(start)) {
    throw std::invalid_argument("start is outside the workspace or inside a static obstacle");
  }
  const Tiling& t = map.tiling();
  TreeBuildParams params;
  params.samples = cfg.rrt_samples;
  params.step = cfg.tree_step > 0.0 ? cfg.tree_step : t.cell_size();
  params.seed = derive_seed(cfg.seed, 0x7472);
  TreeBuildReport report;
  Forest forest = build_initial_tree(map, goal, params, &report);
  InitialPlan plan{std::move(forest), {}, std::move(report)};
  if (start == goal) {
    plan.trajectory = make_trajectory({start}, {plan.forest.goal_root()}, cfg.v_r, 0.0);
    return plan;
  }
  const EdgeFeasibility feasible(map, {});
  const auto entry = best_goal_tree_entry(plan.forest, start, feasible, connect_radius(cfg, t));
  if (!entry) {
    throw std::runtime_error("start isolated: no feasible edge from the start into the tree");
  }
  plan.trajectory = path_from(plan.forest, start, *entry, cfg.v_r, 0.0);
  return plan;
}

Planner::Planner(const StaticMap& map, Point2 goal, const PlannerConfig& cfg, InitialPlan plan)
    : map_(map),
      goal_(goal),
      cfg_(cfg),
      forest_(std::move(plan.forest)),
      trajectory_(std::move(plan.trajectory)),
      rng_(derive_seed(cfg.seed, 0x7265)) {}

RiskParams Planner::risk_params() const {
  RiskParams rp;
  rp.t_rh = cfg_.t_rh;
  rp.t_oh = cfg_.t_oh;
  rp.robot_radius = cfg_.robot_radius;
  rp.r_min = cfg_.r_min > 0.0 ? cfg_.r_min : map_.tiling().cell_size();
  return rp;
}

TickOutcome Planner::tick(Point2 cobot, double cobot_speed, std::span<const ObstacleState> obstacles,
                          std::size_t next_waypoint, double now) {
  TickOutcome out;
  out.risk = compute_risk(cobot, cobot_speed, obstacles, risk_params());

  std::vector<Point2> poly;
  std::optional<std::size_t> violation;
  if (has_path()) {
    poly.push_back(cobot);
    for (std::size_t i = next_waypoint; i < trajectory_.waypoints.size(); ++i) {
      poly.push_back(trajectory_.waypoints[i]);
    }
    violation = first_violation(poly, out.risk);
    if (!violation) {
      out.kind = TickKind::kept;
      return out;
    }
  }

  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t work_before = forest_.work().total();
  const bool ok = replan(cobot, out.risk, violation, std::move(poly), next_waypoint, now, out);
  out.kind = ok ? TickKind::replanned : TickKind::failed;
  out.work_units = forest_.work().total() - work_before;
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

bool Planner::replan(Point2 cobot, const RiskModel& risk,
                     std::optional<std::size_t> violation, std::vector<Point2> polyline, std::size_t next_waypoint,
                     double now, TickOutcome& out) {
  const Tiling& t = map_.tiling();
  const double radius = connect_radius(cfg_, t);

  std::vector<std::uint8_t> included(risk.ohz.size(), 0);
  std::vector<Disc>& zones = out.pruned_zones;
  for (std::size_t z = 0; z < risk.ohz.size(); ++z) {
    if (discs_intersect(risk.ohz[z].disc, risk.lrz)) {
      included[z] = 1;
      zones.push_back(risk.ohz[z].disc);
    }
  }
  auto include = [&](const std::vector<std::size_t>& extra) {
    bool added = false;
    for (const std::size_t z : extra) {
      if (included[z] == 0) {
        included[z] = 1;
        zones.push_back(risk.ohz[z].disc);
        added = true;
      }
    }
    return added;
  };
  if (violation) {
    include(offending_zones(polyline, risk));
  }

  // Remaining path nodes, cobot side first, for locating the window centre.
  std::vector<NodeId> path_nodes;
  if (has_path()) {
    for (std::size_t i = next_waypoint; i < trajectory_.nodes.size(); ++i) {
      if (trajectory_.nodes[i] != NodeId::none) {
        path_nodes.push_back(trajectory_.nodes[i]);
      }
    }
  }

  RepairParams rp;
  rp.l_max = cfg_.l_max;
  rp.connect_radius = radius;
  rp.fallback_samples = cfg_.fallback_samples;
  rp.fallback = cfg_.fallback;

  trajectory_ = Trajectory{};
  bool success = false;
  for (std::size_t attempt = 0; attempt <= risk.ohz.size(); ++attempt) {
    std::vector<NodeId> newly_pruned;
    if (!zones.empty()) {
      PruneResult pr = prune(forest_, zones);
      out.prune.nodes_touched += pr.stats.nodes_touched;
      out.prune.cells_scanned += pr.stats.cells_scanned;
      out.prune.nodes_pruned += pr.stats.nodes_pruned;
      out.prune.edges_cut += pr.stats.edges_cut;
      newly_pruned = std::move(pr.pruned);
    } else {
      forest_.reset_labels();
    }

    CellIndex center = t.cell_of(cobot);
    std::optional<NodeId> n_hat;
    double n_hat_d = kInfinity;
    for (const NodeId n : path_nodes) {
      if (std::binary_search(newly_pruned.begin(), newly_pruned.end(), n)) {
        const double d = distance(cobot, forest_.position(n));
        if (d < n_hat_d) {
          n_hat_d = d;
          n_hat = n;
        }
      }
    }
    if (n_hat) {
      center = forest_.cell(*n_hat);
    } else if (violation && attempt == 0) {
      center = t.cell_of(polyline[*violation]);
    }

    const RepairResult rr = repair(forest_, map_, zones, cobot, goal_, center, rp, rng_);
    out.final_l = rr.final_l;
    out.connections += rr.connections.size();
    out.fallback_used = out.fallback_used || rr.fallback_used;
    if (!rr.success) {
      break;
    }
    rewire_cascade(forest_, map_, zones, rr.seeds);
    const EdgeFeasibility feasible(map_, zones, &forest_.work());
    const auto entry = best_goal_tree_entry(forest_, cobot, feasible, radius);
    if (!entry) {
      break;
    }
    Trajectory candidate = path_from(forest_, cobot, *entry, cfg_.v_r, now);
    if (include(offending_zones(candidate.waypoints, risk))) {
      continue;
    }
    trajectory_ = std::move(candidate);
    success = true;
    break;
  }

  out.still_pruned = reintegrate(forest_, map_, zones).still_pruned;
  return success;
}

}  // namespace smart
