#include "smart/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace smart {

namespace {

constexpr int kMaxRedraws = 50;
constexpr int kPlacementTries = 10000;

// Stream ids for derive_seed.
constexpr std::uint64_t kNoiseStream = 2;
constexpr std::uint64_t kPlannerStream = 3;
constexpr std::uint64_t kScriptStream = 4;
constexpr std::uint64_t kSpawnStream = 16;

void redraw(WalkState& walk, double walk_max, Rng& rng) {
  walk.heading = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  walk.remaining = uniform(rng, 0.0, walk_max);
}

bool can_move(const StaticMap& map, Point2 from, Point2 to) {
  return map.free_at(to) && !map.segment_blocked({from, to});
}

double distance_to_polyline(Point2 p, std::span<const Point2> path) {
  if (path.size() == 1) {
    return distance(p, path[0]);
  }
  double best = kInfinity;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    best = std::min(best, distance(p, closest_point({path[i], path[i + 1]}, p)));
  }
  return best;
}

}  // namespace

void obstacle_step(SimObstacle& o, const StaticMap& map, double duration, double walk_max) {
  Point2& pos = o.state.position;
  if (o.velocity) {
    const Point2 next = pos + duration * *o.velocity;
    if (can_move(map, pos, next)) {
      pos = next;
    }
    return;
  }
  const double step = o.state.speed * duration;
  if (!(step > 0.0)) {
    return;
  }
  for (int redraws = 0;; ++redraws) {
    if (o.walk.remaining >= step) {
      const Point2 next{pos.x + step * std::cos(o.walk.heading), pos.y + step * std::sin(o.walk.heading)};
      if (can_move(map, pos, next)) {
        pos = next;
        o.walk.remaining -= step;
        return;
      }
    }
    if (redraws == kMaxRedraws) {
      return;
    }
    redraw(o.walk, walk_max, o.rng);
  }
}

Perception perceive(Point2 cobot, std::span<const ObstacleState> obstacles, const NoiseModel& noise, Rng& rng) {
  Perception p;
  const double bl = noise.localization_bound;
  p.cobot = {cobot.x + uniform(rng, -bl, bl), cobot.y + uniform(rng, -bl, bl)};
  p.obstacles.reserve(obstacles.size());
  for (const ObstacleState& o : obstacles) {
    const Point2 rel = o.position - cobot;
    const double range = std::hypot(rel.x, rel.y) + uniform(rng, -noise.range_bound, noise.range_bound);
    const double bearing = std::atan2(rel.y, rel.x) + uniform(rng, -noise.heading_bound, noise.heading_bound);
    ObstacleState seen = o;
    seen.position = {p.cobot.x + range * std::cos(bearing), p.cobot.y + range * std::sin(bearing)};
    p.obstacles.push_back(seen);
  }
  return p;
}

std::vector<SimObstacle> spawn_obstacles(const ScenarioConfig& cfg, std::span<const Point2> initial_path,
                                         std::uint64_t seed) {
  std::vector<SimObstacle> out;
  if (!cfg.scripted.empty()) {
    for (std::size_t k = 0; k < cfg.scripted.size(); ++k) {
      const ScriptedObstacle& s = cfg.scripted[k];
      const double speed = std::hypot(s.velocity.x, s.velocity.y);
      out.push_back({{static_cast<int>(k), s.position, speed, s.radius}, {}, s.velocity,
                     Rng(derive_seed(seed, kScriptStream, k))});
    }
    return out;
  }

  const Tiling& t = cfg.map.tiling();
  const Point2 o = t.origin();
  auto draw = [&](int attempt) {
    std::vector<SimObstacle> obs;
    for (int k = 0; k < cfg.obstacle_count; ++k) {
      Rng rng(derive_seed(seed, kSpawnStream + static_cast<std::uint64_t>(attempt), static_cast<std::uint64_t>(k)));
      Point2 p = cfg.goal;
      for (int i = 0; i < kPlacementTries; ++i) {
        const Point2 q{uniform(rng, o.x, o.x + t.width()), uniform(rng, o.y, o.y + t.height())};
        if (cfg.map.free_at(q) && distance(q, cfg.start) >= cfg.min_start_distance) {
          p = q;
          break;
        }
      }
      SimObstacle s{{k, p, cfg.obstacle_speed, cfg.obstacle_radius}, {}, std::nullopt, std::move(rng)};
      redraw(s.walk, cfg.walk_max_distance, s.rng);
      obs.push_back(std::move(s));
    }
    return obs;
  };

  double path_length = 0.0;
  for (std::size_t i = 0; i + 1 < initial_path.size(); ++i) {
    path_length += distance(initial_path[i], initial_path[i + 1]);
  }
  const double nominal = path_length / cfg.planner.v_r;
  auto enters_corridor = [&](std::vector<SimObstacle> obs) {
    for (double t_sim = 0.0;; t_sim += cfg.dt) {
      for (const SimObstacle& s : obs) {
        if (distance_to_polyline(s.state.position, initial_path) <= cfg.corridor_half_width) {
          return true;
        }
      }
      if (t_sim >= nominal) {
        return false;
      }
      for (SimObstacle& s : obs) {
        obstacle_step(s, cfg.map, cfg.dt, cfg.walk_max_distance);
      }
    }
  };

  for (int attempt = 0; attempt < cfg.corridor_attempts; ++attempt) {
    out = draw(attempt);
    if (cfg.corridor_half_width <= 0.0 || out.empty() || initial_path.empty() || enters_corridor(out)) {
      break;
    }
  }
  return out;
}

TrialResult run_trial(const ScenarioConfig& cfg, std::uint64_t seed, TrialObserver* observer) {
  TrialResult result;
  PlannerConfig pcfg = cfg.planner;
  pcfg.seed = derive_seed(seed, kPlannerStream);
  InitialPlan plan = plan_initial(cfg.map, cfg.start, cfg.goal, pcfg);
  std::vector<SimObstacle> obstacles = spawn_obstacles(cfg, plan.trajectory.waypoints, seed);
  Planner planner(cfg.map, cfg.goal, pcfg, std::move(plan));
  Rng noise_rng(derive_seed(seed, kNoiseStream));
  if (observer != nullptr) {
    observer->on_start(cfg, planner, obstacles);
  }

  const Tiling& tiling = cfg.map.tiling();
  const double v = pcfg.v_r;
  const double r_robot = pcfg.robot_radius;
  const double timeout = cfg.timeout_factor * std::max(distance(cfg.start, cfg.goal), tiling.cell_size()) / v;
  Point2 cobot = cfg.start;
  std::size_t next = 1;
  bool braked = false;
  double t = 0.0;

  auto collided = [&] {
    return std::any_of(obstacles.begin(), obstacles.end(), [&](const SimObstacle& s) {
      return distance(cobot, s.state.position) < s.state.radius + r_robot;
    });
  };
  // Moves every obstacle for `duration` in sub-steps no longer than dt.
  auto advance_obstacles = [&](double duration) {
    const int steps = std::max(1, static_cast<int>(std::ceil(duration / cfg.dt)));
    const double h = duration / steps;
    for (int i = 0; i < steps; ++i) {
      for (SimObstacle& s : obstacles) {
        obstacle_step(s, cfg.map, h, cfg.walk_max_distance);
      }
      if (collided()) {
        return true;
      }
    }
    return false;
  };
  auto finish = [&](TrialResult r) {
    if (observer != nullptr) {
      observer->on_finish(r);
    }
    return r;
  };

  if (cfg.start == cfg.goal) {
    result.success = true;
    return finish(result);
  }
  if (collided()) {
    result.collision = true;
    return finish(result);
  }

  std::vector<ObstacleState> states;
  while (true) {
    if (t >= timeout) {
      result.timeout = true;
      return finish(result);
    }
    states.clear();
    for (const SimObstacle& s : obstacles) {
      states.push_back(s.state);
    }
    Perception seen = perceive(cobot, states, cfg.noise, noise_rng);
    seen.cobot.x = std::clamp(seen.cobot.x, tiling.origin().x, tiling.origin().x + tiling.width());
    seen.cobot.y = std::clamp(seen.cobot.y, tiling.origin().y, tiling.origin().y + tiling.height());
    const TickOutcome out = planner.tick(seen.cobot, braked ? 0.0 : v, seen.obstacles, next, t);
    result.ticks++;
    if (observer != nullptr) {
      observer->on_tick(t, cobot, obstacles, out, planner);
    }

    if (out.kind != TickKind::kept) {
      const double charge = cfg.clock.charge(out.wall_seconds, out.work_units);
      if (out.kind == TickKind::replanned) {
        result.replan_count++;
        result.replanning_times.push_back(charge);
        result.replanning_wall_times.push_back(out.wall_seconds);
        next = 1;
      } else {
        result.failed_ticks++;
      }
      result.charged_time += charge;
      if (charge > 0.0) {
        const bool hit = advance_obstacles(charge);
        t += charge;
        if (hit) {
          result.collision = true;
          return finish(result);
        }
      }
    }

    double step_time = cfg.dt;
    bool arrived = false;
    if (planner.has_path()) {
      braked = false;
      const auto& wps = planner.trajectory().waypoints;
      double budget = v * cfg.dt;
      double moved = 0.0;
      while (budget > 0.0 && next < wps.size()) {
        const double d = distance(cobot, wps[next]);
        if (d <= budget) {
          cobot = wps[next];
          budget -= d;
          moved += d;
          ++next;
        } else {
          cobot = cobot + (budget / d) * (wps[next] - cobot);
          moved += budget;
          budget = 0.0;
        }
      }
      arrived = next >= wps.size();
      if (arrived) {
        step_time = moved / v;
      }
      result.distance_travelled += moved;
    } else {
      braked = true;
    }

    const bool hit = step_time > 0.0 ? advance_obstacles(step_time) : collided();
    t += step_time;
    result.motion_time += step_time;
    if (hit) {
      result.collision = true;
      return finish(result);
    }
    if (arrived) {
      result.success = true;
      result.travel_time = t;
      return finish(result);
    }
  }
}

}  // namespace smart
