#include "smart/trace.hpp"

#include <algorithm>
#include <charconv>
#include <string_view>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace smart {

TraceWriter::TraceWriter(std::ostream& out, ReplanClock clock) : out_(out), clock_(clock) {}

void TraceWriter::on_start(const ScenarioConfig& cfg, const Planner& planner, std::span<const SimObstacle>) {
  const Tiling& t = cfg.map.tiling();
  fmt::print(out_, "SMART-TRACE 1\n");
  fmt::print(out_, "WORKSPACE {} {} {} {} {}\n", t.origin().x, t.origin().y, t.width(), t.height(), t.cell_size());
  for (std::size_t i = 0; i < t.cell_count(); ++i) {
    const CellIndex c = t.from_linear(i);
    if (cfg.map.occupied(c)) {
      fmt::print(out_, "STATIC {} {}\n", c.col, c.row);
    }
  }
  fmt::print(out_, "ROBOT {}\n", cfg.planner.robot_radius);
  const Forest& f = planner.forest();
  fmt::print(out_, "GOAL {} {} {}\n", planner.goal().x, planner.goal().y, static_cast<int>(f.goal_root()));
  write_tree_delta(f);
  write_path(0.0, planner.trajectory());
}

void TraceWriter::write_tree_delta(const Forest& forest) {
  const std::size_t known = parents_.size();
  for (std::size_t i = known; i < forest.size(); ++i) {
    const Point2 p = forest.position(node_id(i));
    fmt::print(out_, "NODE {} {} {}\n", i, p.x, p.y);
  }
  parents_.resize(forest.size(), NodeId::none);
  active_.resize(forest.size(), true);
  for (std::size_t i = 0; i < forest.size(); ++i) {
    const NodeId id = node_id(i);
    const NodeId now = forest.parent(id);
    if (now != parents_[i] && parents_[i] != NodeId::none) {
      fmt::print(out_, "EDGE- {} {}\n", i, static_cast<int>(parents_[i]));
    }
    const bool act = forest.active(id);
    if (act != active_[i]) {
      fmt::print(out_, "{} {}\n", act ? "ACTIVE" : "PRUNED", i);
      active_[i] = act;
    }
    if (now != parents_[i] && now != NodeId::none) {
      fmt::print(out_, "EDGE+ {} {}\n", i, static_cast<int>(now));
    }
    parents_[i] = now;
  }
}

void TraceWriter::write_path(double t, const Trajectory& traj) {
  fmt::print(out_, "PATH {}", t);
  for (const Point2 p : traj.waypoints) {
    fmt::print(out_, " {} {}", p.x, p.y);
  }
  fmt::print(out_, "\n");
}

void TraceWriter::on_tick(double t, Point2 cobot, std::span<const SimObstacle> obstacles, const TickOutcome& outcome,
                          const Planner& planner) {
  fmt::print(out_, "TICK {} {} {}\n", t, cobot.x, cobot.y);
  for (const SimObstacle& o : obstacles) {
    fmt::print(out_, "OBS {} {} {} {}\n", o.state.id, o.state.position.x, o.state.position.y, o.state.radius);
  }
  const RiskModel& r = outcome.risk;
  fmt::print(out_, "LRZ {} {} {}\n", r.lrz.center.x, r.lrz.center.y, r.lrz.radius);
  for (const HazardZone& z : r.ohz) {
    fmt::print(out_, "OHZ {} {} {} {}\n", z.obstacle_id, z.disc.center.x, z.disc.center.y, z.disc.radius);
  }
  const std::vector<Disc>& cpr = outcome.kind == TickKind::kept ? r.cpr : outcome.pruned_zones;
  for (const Disc& d : cpr) {
    fmt::print(out_, "CPR {} {} {}\n", d.center.x, d.center.y, d.radius);
  }
  if (outcome.kind == TickKind::kept) {
    return;
  }
  const double ms = clock_.charge(outcome.wall_seconds, outcome.work_units) * 1e3;
  if (outcome.kind == TickKind::replanned) {
    fmt::print(out_, "REPLAN {} {} {}\n", t, ms, outcome.final_l);
  } else {
    fmt::print(out_, "FAIL {} {}\n", t, ms);
  }
  write_tree_delta(planner.forest());
  if (outcome.kind == TickKind::replanned) {
    write_path(t, planner.trajectory());
  }
}

void TraceWriter::on_finish(const TrialResult& result) {
  fmt::print(out_, "RESULT {} {} {} {}\n", result.success ? 1 : 0, result.collision ? 1 : 0, result.timeout ? 1 : 0,
             result.success ? result.travel_time : 0.0);
  out_.flush();
}

namespace {

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no) : line_no_(line_no) {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
        ++i;
      }
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
        ++i;
      }
      if (i > start) {
        tokens_.push_back(line.substr(start, i - start));
      }
    }
  }

  bool empty() const { return tokens_.empty(); }
  std::string_view tag() const { return tokens_.front(); }
  std::size_t fields() const { return tokens_.size() - 1; }

  void expect(std::size_t n) const {
    if (fields() != n) {
      fail(fmt::format("{} expects {} fields, found {}", tag(), n, fields()));
    }
  }

  double num(std::size_t i) const {
    const std::string_view s = field(i);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail(fmt::format("bad number '{}'", s));
    }
    return v;
  }

  int integer(std::size_t i) const {
    const std::string_view s = field(i);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      fail(fmt::format("bad integer '{}'", s));
    }
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw TraceError(fmt::format("trace:{}: {}", line_no_, msg));
  }

 private:
  std::string_view field(std::size_t i) const {
    if (i + 1 >= tokens_.size()) {
      fail("missing field");
    }
    return tokens_[i + 1];
  }

  std::vector<std::string_view> tokens_;
  std::size_t line_no_;
};

}  // namespace

TraceData read_trace(std::istream& in) {
  TraceData data;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  bool workspace = false;
  TraceTick* tick = nullptr;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const LineParser p(line, line_no);
    if (p.empty()) {
      continue;
    }
    const std::string_view tag = p.tag();
    if (!header) {
      if (tag != "SMART-TRACE" || p.fields() != 1 || p.integer(0) != 1) {
        p.fail("expected header 'SMART-TRACE 1'");
      }
      header = true;
      continue;
    }
    std::vector<TraceNodeDelta>& deltas = tick != nullptr ? tick->deltas : data.initial;
    if (tag == "WORKSPACE") {
      p.expect(5);
      data.origin = {p.num(0), p.num(1)};
      data.width = p.num(2);
      data.height = p.num(3);
      data.cell_size = p.num(4);
      if (!(data.width > 0.0) || !(data.height > 0.0) || !(data.cell_size > 0.0)) {
        p.fail("workspace dimensions must be positive");
      }
      workspace = true;
    } else if (tag == "STATIC") {
      p.expect(2);
      data.static_cells.push_back({p.integer(0), p.integer(1)});
    } else if (tag == "ROBOT") {
      p.expect(1);
      data.robot_radius = p.num(0);
    } else if (tag == "GOAL") {
      p.expect(3);
      data.goal = {p.num(0), p.num(1)};
      data.goal_node = p.integer(2);
    } else if (tag == "NODE") {
      p.expect(3);
      deltas.push_back({TraceNodeDelta::Kind::add, p.integer(0), -1, {p.num(1), p.num(2)}});
    } else if (tag == "EDGE+" || tag == "EDGE-") {
      p.expect(2);
      deltas.push_back({tag == "EDGE+" ? TraceNodeDelta::Kind::link : TraceNodeDelta::Kind::unlink, p.integer(0),
                        p.integer(1), {}});
    } else if (tag == "PRUNED" || tag == "ACTIVE") {
      p.expect(1);
      deltas.push_back(
          {tag == "PRUNED" ? TraceNodeDelta::Kind::prune : TraceNodeDelta::Kind::activate, p.integer(0), -1, {}});
    } else if (tag == "PATH") {
      if (p.fields() < 1 || (p.fields() - 1) % 2 != 0) {
        p.fail("PATH expects a time and coordinate pairs");
      }
      std::vector<Point2> path;
      for (std::size_t i = 1; i < p.fields(); i += 2) {
        path.push_back({p.num(i), p.num(i + 1)});
      }
      if (tick != nullptr) {
        tick->path = std::move(path);
      } else {
        data.initial_path = std::move(path);
      }
    } else if (tag == "TICK") {
      p.expect(3);
      if (!workspace) {
        p.fail("TICK before WORKSPACE");
      }
      data.ticks.push_back({});
      tick = &data.ticks.back();
      tick->t = p.num(0);
      tick->cobot = {p.num(1), p.num(2)};
    } else if (tag == "OBS" || tag == "LRZ" || tag == "OHZ" || tag == "CPR" || tag == "REPLAN" || tag == "FAIL") {
      if (tick == nullptr) {
        p.fail(fmt::format("{} outside a tick", tag));
      }
      if (tag == "OBS") {
        p.expect(4);
        tick->obstacles.push_back({p.integer(0), {p.num(1), p.num(2)}, p.num(3)});
      } else if (tag == "LRZ") {
        p.expect(3);
        tick->lrz = Disc{{p.num(0), p.num(1)}, p.num(2)};
      } else if (tag == "OHZ") {
        p.expect(4);
        tick->ohz.push_back({p.integer(0), Disc{{p.num(1), p.num(2)}, p.num(3)}});
      } else if (tag == "CPR") {
        p.expect(3);
        tick->cpr.push_back(Disc{{p.num(0), p.num(1)}, p.num(2)});
      } else if (tag == "REPLAN") {
        p.expect(3);
        tick->replanned = true;
        tick->duration_ms = p.num(1);
        tick->l_final = p.integer(2);
      } else {
        p.expect(2);
        tick->failed = true;
        tick->duration_ms = p.num(1);
      }
    } else if (tag == "RESULT") {
      p.expect(4);
      data.result = line;
    } else {
      p.fail(fmt::format("unknown record '{}'", tag));
    }
  }
  if (!header) {
    throw TraceError("trace: missing header");
  }
  if (!workspace) {
    throw TraceError("trace: missing WORKSPACE record");
  }
  return data;
}

TreeSnapshot replay(const TraceData& trace, std::size_t index) {
  if (index >= trace.ticks.size()) {
    throw TraceError(fmt::format("tick {} out of range (trace has {} ticks)", index, trace.ticks.size()));
  }
  TreeSnapshot s;
  auto apply = [&](const std::vector<TraceNodeDelta>& deltas) {
    for (const TraceNodeDelta& d : deltas) {
      if (d.node < 0 || (d.kind != TraceNodeDelta::Kind::add && static_cast<std::size_t>(d.node) >= s.parents.size())) {
        throw TraceError(fmt::format("trace: unknown node {}", d.node));
      }
      const auto i = static_cast<std::size_t>(d.node);
      switch (d.kind) {
        case TraceNodeDelta::Kind::add:
          if (i >= s.positions.size()) {
            s.positions.resize(i + 1);
            s.parents.resize(i + 1, -1);
            s.active.resize(i + 1, true);
          }
          s.positions[i] = d.position;
          break;
        case TraceNodeDelta::Kind::link:
          if (d.other < 0 || static_cast<std::size_t>(d.other) >= s.parents.size()) {
            throw TraceError(fmt::format("trace: unknown parent {}", d.other));
          }
          s.parents[i] = d.other;
          break;
        case TraceNodeDelta::Kind::unlink:
          s.parents[i] = -1;
          break;
        case TraceNodeDelta::Kind::prune:
          s.active[i] = false;
          break;
        case TraceNodeDelta::Kind::activate:
          s.active[i] = true;
          break;
      }
    }
  };
  apply(trace.initial);
  s.path = trace.initial_path;
  for (std::size_t k = 0; k <= index; ++k) {
    apply(trace.ticks[k].deltas);
    if (trace.ticks[k].path) {
      s.path = *trace.ticks[k].path;
    } else if (trace.ticks[k].failed) {
      s.path.clear();
    }
  }

  // Roots by walking parents; bounded to reject cyclic input.
  const std::size_t n = s.parents.size();
  std::vector<int> root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    int cur = static_cast<int>(i);
    std::size_t steps = 0;
    while (s.parents[static_cast<std::size_t>(cur)] >= 0) {
      cur = s.parents[static_cast<std::size_t>(cur)];
      if (++steps > n) {
        throw TraceError("trace: cycle in parent links");
      }
    }
    root[i] = cur;
  }
  std::vector<int> roots;
  for (std::size_t i = 0; i < n; ++i) {
    if (s.active[i] && root[i] != trace.goal_node) {
      roots.push_back(root[i]);
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  s.tree_index.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (!s.active[i]) {
      continue;
    }
    if (root[i] == trace.goal_node) {
      s.tree_index[i] = 0;
    } else {
      s.tree_index[i] = 1 + static_cast<int>(std::lower_bound(roots.begin(), roots.end(), root[i]) - roots.begin());
    }
  }
  return s;
}

}  // namespace smart
