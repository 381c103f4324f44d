#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "smart/scenario.hpp"
#include "smart/sim.hpp"

namespace smart {

/// Linear-interpolated percentile (q in [0, 1]) of unsorted samples; NaN when empty.
double percentile(std::vector<double> samples, double q);
double mean(std::span<const double> samples);

struct BenchRow {
  int n_obstacles = 0;
  double speed = 0.0;
  int trials = 0;
  double success_rate = 0.0;
  double replan_mean_ms = 0.0;
  double replan_median_ms = 0.0;
  double replan_p25_ms = 0.0;
  double replan_p75_ms = 0.0;
  double travel_median_s = 0.0;
  double travel_p25_s = 0.0;
  double travel_p75_s = 0.0;
};

/// Aggregates trials of one configuration. Replanning statistics pool every
/// replan of every trial; travel statistics use successful trials only.
BenchRow summarize(int n_obstacles, double speed, std::span<const TrialResult> trials);

/// Seed of trial `index` of the (count, speed) configuration.
std::uint64_t trial_seed(std::uint64_t base, int n_obstacles, double speed, int index);

struct BenchOptions {
  std::vector<int> counts;
  std::vector<double> speeds;
  int trials = 1;
  int jobs = 1;
  /// Called once per finished trial (from worker threads).
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Runs every (count, speed, trial) on a pool of `jobs` threads. Results are
/// ordered by configuration (counts outer, speeds inner) and trial index, so
/// the output does not depend on scheduling.
std::vector<std::vector<TrialResult>> run_grid(const ScenarioConfig& base, const BenchOptions& opts);

std::vector<BenchRow> run_bench(const ScenarioConfig& base, const BenchOptions& opts);

void write_csv(std::ostream& out, std::span<const BenchRow> rows);

}  // namespace smart
