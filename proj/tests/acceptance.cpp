// Acceptance suite. Each check prints one [PASS]/[FAIL] line; pass criterion
// numbers on the command line to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "oracles.hpp"
#include "smart/bench.hpp"
#include "smart/planner.hpp"
#include "smart/pruning.hpp"
#include "smart/repair.hpp"
#include "smart/scenario.hpp"
#include "smart/sim.hpp"
#include "smart/tree.hpp"

using namespace smart;
using namespace smart::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Point2 free_point_outside(Rng& rng, const StaticMap& map, std::span<const Disc> discs) {
  Point2 p = random_free_point(rng, map);
  for (int i = 0; i < 200 && in_any_disc(discs, p); ++i) {
    p = random_free_point(rng, map);
  }
  return p;
}

std::vector<Disc> discs_avoiding(Rng& rng, const Tiling& t, int count, double r_lo, double r_hi, Point2 keep_out) {
  for (;;) {
    auto d = random_discs(rng, t, count, r_lo, r_hi);
    if (!in_any_disc(d, keep_out)) {
      return d;
    }
  }
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// Repair success against reachability over the alive-node neighbour graph.
Outcome completeness() {
  Rng rng(derive_seed(101, 1));
  int agree = 0;
  int reachable = 0;
  int bad_edges = 0;
  int bad_forests = 0;
  int bad_entries = 0;
  const int n = 200;
  for (int k = 0; k < n; ++k) {
    InstanceShape shape;
    shape.nodes = uniform_int(rng, 40, 80);
    shape.occupied_fraction = k % 2 == 0 ? 0.0 : 0.1;
    Instance inst = random_instance(rng, shape);
    const auto discs = random_discs(rng, inst.map.tiling(), uniform_int(rng, 1, 3), 0.3, 1.5);
    const Point2 cobot = free_point_outside(rng, inst.map, discs);
    prune(inst.forest, discs);
    const double radius = 1.5 * inst.map.tiling().cell_size();
    const bool expected = oracle_reachable(inst.forest, inst.map, discs, cobot, radius);

    RepairParams params;
    params.fallback = false;
    Rng repair_rng(derive_seed(101, 2, static_cast<std::uint64_t>(k)));
    const RepairResult res = repair(inst.forest, inst.map, discs, cobot, inst.goal,
                                    inst.map.tiling().cell_of(cobot), params, repair_rng);
    agree += res.success == expected ? 1 : 0;
    reachable += expected ? 1 : 0;
    for (const Connection& c : res.connections) {
      if (!edge_ok(inst.map, discs, inst.forest.position(c.parent), inst.forest.position(c.child))) {
        ++bad_edges;
      }
    }
    if (!forest_violations(inst.forest).empty()) {
      ++bad_forests;
    }
    if (res.success) {
      const NodeId e = *res.connect_node;
      const Point2 p = inst.forest.position(e);
      if (!in_goal_tree(inst.forest, e) || distance(cobot, p) > radius || !edge_ok(inst.map, discs, cobot, p)) {
        ++bad_entries;
      }
    }
  }
  return {agree == n && bad_edges == 0 && bad_forests == 0 && bad_entries == 0,
          fmt::format("{}/{} agree ({} reachable), infeasible connections {}, broken forests {}, bad entries {}",
                      agree, n, reachable, bad_edges, bad_forests, bad_entries)};
}

// Prune output against survivors and components recomputed from the
// pre-prune edge list.
Outcome pruning() {
  Rng rng(derive_seed(102, 1));
  const int n = 500;
  int failures = 0;
  int edge_only_instances = 0;
  std::size_t edge_only_total = 0;
  std::string first_failure;
  for (int k = 0; k < n; ++k) {
    InstanceShape shape;
    shape.cols = shape.rows = 10;
    shape.nodes = uniform_int(rng, 100, 200);
    shape.occupied_fraction = k % 2 == 0 ? 0.0 : 0.1;
    Instance inst = random_instance(rng, shape);
    Forest& f = inst.forest;
    const auto discs = discs_avoiding(rng, inst.map.tiling(), uniform_int(rng, 1, 3), 0.1, 1.2, inst.goal);

    std::vector<std::pair<NodeId, NodeId>> edges_before;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f.parent(node_id(i)) != NodeId::none) {
        edges_before.emplace_back(node_id(i), f.parent(node_id(i)));
      }
    }
    const PruneResult res = prune(f, discs);
    // Pruning only looks at the discs; static cells are irrelevant here.
    const StaticMap open(inst.map.tiling());

    std::vector<std::string> problems;
    std::vector<std::uint8_t> survives(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      survives[i] = in_any_disc(discs, f.position(node_id(i))) ? 0 : 1;
      if ((f.node(node_id(i)).status == NodeStatus::active) != (survives[i] == 1)) {
        problems.push_back(fmt::format("node {} status", i));
      }
    }
    std::set<std::pair<NodeId, NodeId>> expected_edges;
    std::set<NodeId> expected_roots{f.goal_root()};
    std::size_t edge_only = 0;
    for (const auto& [child, parent] : edges_before) {
      if (survives[index(child)] == 0) {
        continue;
      }
      const bool ends_ok = survives[index(parent)] == 1;
      const bool clear = edge_ok(open, discs, f.position(child), f.position(parent));
      if (ends_ok && clear) {
        expected_edges.emplace(child, parent);
      } else {
        expected_roots.insert(child);
        edge_only += ends_ok ? 1 : 0;
      }
    }
    std::set<std::pair<NodeId, NodeId>> actual_edges;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const NodeId id = node_id(i);
      if (f.node(id).status == NodeStatus::active && f.parent(id) != NodeId::none) {
        actual_edges.emplace(id, f.parent(id));
        if (!edge_ok(open, discs, f.position(id), f.position(f.parent(id)))) {
          problems.push_back(fmt::format("retained edge {} crosses a disc", i));
        }
      }
    }
    if (actual_edges != expected_edges) {
      problems.push_back("edge set");
    }
    if (std::set<NodeId>(res.roots.begin(), res.roots.end()) != expected_roots || res.roots.front() != f.goal_root()) {
      problems.push_back("root list");
    }
    if (res.stats.edges_cut != edge_only) {
      problems.push_back(fmt::format("edges_cut {} expected {}", res.stats.edges_cut, edge_only));
    }

    UnionFind uf(f.size());
    for (const auto& [a, b] : expected_edges) {
      uf.unite(index(a), index(b));
    }
    std::map<std::size_t, NodeId> component_root;
    std::set<NodeId> roots_seen;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (survives[i] == 0) {
        continue;
      }
      const NodeId root = walk_root(f, node_id(i));
      const auto [it, fresh] = component_root.emplace(uf.find(i), root);
      if (!fresh && it->second != root) {
        problems.push_back(fmt::format("component of node {} has two roots", i));
      }
      roots_seen.insert(root);
    }
    if (roots_seen.size() != component_root.size() || roots_seen != expected_roots) {
      problems.push_back("partition differs from union-find components");
    }
    for (const std::string& v : forest_violations(f)) {
      problems.push_back(v);
    }

    if (!problems.empty()) {
      if (failures++ == 0) {
        first_failure = fmt::format(" (instance {}: {})", k, problems.front());
      }
    }
    if (edge_only > 0) {
      ++edge_only_instances;
      edge_only_total += edge_only;
    }
  }
  return {failures == 0 && edge_only_instances >= 20,
          fmt::format("{}/{} exact, edge-only cuts verified in {} instances ({} edges){}", n - failures, n,
                      edge_only_instances, edge_only_total, first_failure)};
}

// Incremental hot-spot maps against a full rescan after every refresh.
Outcome hotspots() {
  Rng rng(derive_seed(103, 1));
  const int n = 100;
  std::size_t refreshes = 0;
  std::size_t cells = 0;
  std::size_t mismatches = 0;
  std::size_t connections = 0;
  for (int k = 0; k < n; ++k) {
    InstanceShape shape;
    shape.cols = shape.rows = 12;
    shape.nodes = uniform_int(rng, 150, 250);
    shape.occupied_fraction = k % 2 == 0 ? 0.0 : 0.08;
    Instance inst = random_instance(rng, shape);
    const auto discs = random_discs(rng, inst.map.tiling(), uniform_int(rng, 2, 4), 0.5, 2.0);
    const Point2 cobot = free_point_outside(rng, inst.map, discs);
    prune(inst.forest, discs);

    RepairParams params;
    params.fallback_samples = 200;
    params.on_refresh = [&](const RepairState& st, Forest& f) {
      ++refreshes;
      for (const CellIndex c : st.region) {
        ++cells;
        const int want = brute_hotspot(f, inst.map, discs, c) ? 1 : -1;
        mismatches += st.hotspot[f.tiling().linear(c)] == want ? 0 : 1;
      }
    };
    Rng repair_rng(derive_seed(103, 2, static_cast<std::uint64_t>(k)));
    const RepairResult res = repair(inst.forest, inst.map, discs, cobot, inst.goal,
                                    inst.map.tiling().cell_of(cobot), params, repair_rng);
    connections += res.connections.size();
  }
  return {mismatches == 0 && connections > 0,
          fmt::format("{} refreshes, {} cell comparisons, {} mismatches, {} connections over {} episodes", refreshes,
                      cells, mismatches, connections, n)};
}

// Costs after the rewiring cascade against Dijkstra over the goal tree.
Outcome rewiring() {
  Rng rng(derive_seed(104, 1));
  const int n = 100;
  int failures = 0;
  std::size_t improved = 0;
  std::size_t checked = 0;
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    InstanceShape shape;
    shape.cols = shape.rows = 10;
    shape.nodes = uniform_int(rng, 50, 200);
    shape.occupied_fraction = k % 2 == 0 ? 0.0 : 0.1;
    Instance inst = random_instance(rng, shape);
    Forest& f = inst.forest;
    const auto discs = random_discs(rng, inst.map.tiling(), uniform_int(rng, 1, 3), 0.3, 1.5);
    const Point2 cobot = free_point_outside(rng, inst.map, discs);
    prune(f, discs);
    RepairParams params;
    params.fallback = false;
    Rng repair_rng(derive_seed(104, 2, static_cast<std::uint64_t>(k)));
    const RepairResult res =
        repair(f, inst.map, discs, cobot, inst.goal, inst.map.tiling().cell_of(cobot), params, repair_rng);

    std::vector<double> before(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      before[i] = f.cost(node_id(i));
    }
    std::vector<NodeId> seeds = res.seeds;
    if (seeds.empty()) {
      seeds.push_back(f.goal_root());
    }
    rewire_cascade(f, inst.map, discs, seeds);

    std::vector<std::uint8_t> t0(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      t0[i] = in_goal_tree(f, node_id(i)) ? 1 : 0;
    }
    const std::vector<double> dist = dijkstra_to_goal(f, inst.map, discs, t0);
    bool ok = forest_violations(f).empty();
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (t0[i] == 0) {
        continue;
      }
      ++checked;
      const double err = std::abs(f.cost(node_id(i)) - dist[i]);
      worst = std::max(worst, std::isfinite(err) ? err : kInfinity);
      ok = ok && err <= 1e-9;
      improved += f.cost(node_id(i)) < before[i] - 1e-12 ? 1 : 0;
    }
    failures += ok ? 0 : 1;
  }
  return {failures == 0, fmt::format("{}/{} forests exact, {} nodes checked, {} costs lowered, max error {:.3g}",
                                     n - failures, n, checked, improved, worst)};
}

// Cell utilities against a direct evaluation of both branches.
Outcome utilities() {
  Rng rng(derive_seed(105, 1));
  const std::size_t target = 10000;
  std::size_t checked = 0;
  std::size_t goal_branch = 0;
  std::size_t mismatches = 0;
  int instance = 0;
  while (checked < target) {
    InstanceShape shape;
    shape.cols = shape.rows = 10;
    shape.nodes = uniform_int(rng, 80, 200);
    shape.occupied_fraction = instance++ % 2 == 0 ? 0.0 : 0.1;
    Instance inst = random_instance(rng, shape);
    const Tiling& t = inst.map.tiling();
    const auto discs = random_discs(rng, t, uniform_int(rng, 1, 4), 0.3, 2.0);
    prune(inst.forest, discs);
    for (int q = 0; q < 4; ++q) {
      const Point2 cobot = random_free_point(rng, inst.map);
      for (std::size_t i = 0; i < t.cell_count() && checked < target; ++i) {
        const CellIndex c = t.from_linear(i);
        if (!brute_hotspot(inst.forest, inst.map, discs, c)) {
          continue;
        }
        const Point2 centroid{t.origin().x + (c.col + 0.5) * t.cell_size(),
                              t.origin().y + (c.row + 0.5) * t.cell_size()};
        double best = kInfinity;
        for (const NodeId id : brute_nodes_in_cell(inst.forest, c)) {
          if (in_goal_tree(inst.forest, id)) {
            best = std::min(best, chain_cost(inst.forest, id));
          }
        }
        const double tail = std::isfinite(best) ? best : distance(centroid, inst.goal);
        goal_branch += std::isfinite(best) ? 1 : 0;
        const double want = 1.0 / std::max(distance(cobot, centroid) + tail, 1e-9);
        mismatches += utility(inst.forest, c, cobot, inst.goal) == want ? 0 : 1;
        ++checked;
      }
    }
  }
  return {mismatches == 0 && goal_branch > 0 && goal_branch < checked,
          fmt::format("{} hot-spot cells, {} with goal-tree nodes, {} without, {} mismatches", checked, goal_branch,
                      checked - goal_branch, mismatches)};
}

// Measured replanning time in the default 32 x 32 m setup.
Outcome replan_time() {
  ScenarioConfig cfg;
  cfg.clock.mode = ClockMode::wall;
  const InitialPlan plan = plan_initial(cfg.map, cfg.start, cfg.goal, cfg.planner);
  std::size_t empty_cells = 0;
  for (std::size_t i = 0; i < cfg.map.tiling().cell_count(); ++i) {
    empty_cells += plan.forest.nodes_in_cell(cfg.map.tiling().from_linear(i)).empty() ? 1 : 0;
  }
  std::vector<double> times;
  const int trials = 30;
  for (int k = 0; k < trials; ++k) {
    const TrialResult r = run_trial(cfg, trial_seed(cfg.seed, cfg.obstacle_count, cfg.obstacle_speed, k));
    times.insert(times.end(), r.replanning_wall_times.begin(), r.replanning_wall_times.end());
  }
  const double median_ms = percentile(times, 0.5) * 1e3;
  return {empty_cells == 0 && times.size() >= 20 && median_ms <= 30.0,
          fmt::format("{} nodes, {} empty cells, {} replans over {} trials, median {:.3f} ms, p75 {:.3f} ms",
                      plan.forest.size(), empty_cells, times.size(), trials, median_ms,
                      percentile(times, 0.75) * 1e3)};
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) {
      ++j;
    }
    for (std::size_t k = i; k <= j; ++k) {
      r[order[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
    }
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Success and travel time trends over obstacle speed.
Outcome trends() {
  ScenarioConfig cfg;
  BenchOptions opts;
  opts.counts = {10};
  opts.speeds = {1.0, 2.0, 3.0, 4.0};
  opts.trials = 100;
  opts.jobs = static_cast<int>(worker_count());
  const auto rows = run_bench(cfg, opts);
  std::vector<double> speeds;
  std::vector<double> travel;
  std::string table;
  bool monotone = true;
  for (const BenchRow& r : rows) {
    speeds.push_back(r.speed);
    if (!travel.empty() && r.travel_median_s < travel.back()) {
      monotone = false;
    }
    travel.push_back(r.travel_median_s);
    table += fmt::format("v={:g}: success {:.2f} travel {:.3f} s; ", r.speed, r.success_rate, r.travel_median_s);
  }
  const double rho = pearson(ranks(speeds), ranks(travel));
  const bool a = rows.back().success_rate < rows.front().success_rate;
  const bool c = rows.front().success_rate >= 0.9;
  return {a && rho > 0.0 && c,
          fmt::format("{}spearman {:.3f}, travel medians {}", table, rho, monotone ? "nondecreasing" : "not monotone")};
}

// Bench CSV does not depend on the worker count.
Outcome determinism() {
  ScenarioConfig cfg;
  BenchOptions opts;
  opts.counts = {5, 10};
  opts.speeds = {1.0, 3.0};
  opts.trials = 8;
  std::string csv[2];
  const int jobs[2] = {1, 4};
  for (int i = 0; i < 2; ++i) {
    opts.jobs = jobs[i];
    std::ostringstream out;
    write_csv(out, run_bench(cfg, opts));
    csv[i] = out.str();
  }
  return {csv[0] == csv[1] && !csv[0].empty(),
          fmt::format("jobs=1 vs jobs=4: {} bytes, {}", csv[0].size(), csv[0] == csv[1] ? "identical" : "different")};
}

// Prune node touches against the number of cells the disc covers.
Outcome prune_scaling() {
  const Tiling t({0.0, 0.0}, 64.0, 64.0, 1.0);
  const StaticMap map(t);
  TreeBuildParams tp;
  tp.samples = 4 * t.cell_count();
  tp.seed = 7;
  const Forest dense = build_initial_tree(map, {32.0, 32.0}, tp);
  Rng rng(derive_seed(109, 1));
  std::vector<double> cover;
  std::vector<double> touched;
  const std::vector<double> radii{1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 5.5, 6.0};
  for (const double r : radii) {
    for (int k = 0; k < 10; ++k) {
      const Disc d{{uniform(rng, 8.0, 56.0), uniform(rng, 8.0, 56.0)}, r};
      std::size_t cells = 0;
      for (std::size_t i = 0; i < t.cell_count(); ++i) {
        const CellIndex c = t.from_linear(i);
        const double nx = std::clamp(d.center.x, double(c.col), double(c.col + 1));
        const double ny = std::clamp(d.center.y, double(c.row), double(c.row + 1));
        cells += std::hypot(nx - d.center.x, ny - d.center.y) <= r ? 1 : 0;
      }
      Forest f = dense;
      const PruneResult res = prune(f, std::span<const Disc>(&d, 1));
      cover.push_back(static_cast<double>(cells));
      touched.push_back(static_cast<double>(res.stats.nodes_touched));
    }
  }
  const double r = pearson(cover, touched);
  const double r2 = r * r;
  return {r2 >= 0.9, fmt::format("{} nodes, {} prunes over radii 1.5-6 m, cover {:.0f}-{:.0f} cells, R^2 {:.4f}",
                                 dense.size(), cover.size(), *std::min_element(cover.begin(), cover.end()),
                                 *std::max_element(cover.begin(), cover.end()), r2)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> checks{
      {"repair completeness", completeness}, {"pruning correctness", pruning},
      {"hot-spot refresh", hotspots},        {"rewiring optimality", rewiring},
      {"utility values", utilities},         {"replanning time", replan_time},
      {"speed trends", trends},              {"bench determinism", determinism},
      {"prune scaling", prune_scaling}};
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) {
    selected.insert(std::atoi(argv[i]));
  }
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && selected.count(number) == 0) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("[{}] {} {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", number, checks[i].first, o.detail, secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
