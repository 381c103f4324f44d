#include "smart/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace smart {

double percentile(std::vector<double> samples, double q) {
  if (samples.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::sort(samples.begin(), samples.end());
  const double pos = q * static_cast<double>(samples.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, samples.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return samples[lo] + (samples[hi] - samples[lo]) * frac;
}

double mean(std::span<const double> samples) {
  if (samples.empty()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double total = 0.0;
  for (const double v : samples) {
    total += v;
  }
  return total / static_cast<double>(samples.size());
}

BenchRow summarize(int n_obstacles, double speed, std::span<const TrialResult> trials) {
  BenchRow row;
  row.n_obstacles = n_obstacles;
  row.speed = speed;
  row.trials = static_cast<int>(trials.size());
  std::vector<double> replans_ms;
  std::vector<double> travel;
  int successes = 0;
  for (const TrialResult& r : trials) {
    for (const double s : r.replanning_times) {
      replans_ms.push_back(s * 1e3);
    }
    if (r.success) {
      ++successes;
      travel.push_back(r.travel_time);
    }
  }
  row.success_rate = trials.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials.size());
  row.replan_mean_ms = mean(replans_ms);
  row.replan_median_ms = percentile(replans_ms, 0.5);
  row.replan_p25_ms = percentile(replans_ms, 0.25);
  row.replan_p75_ms = percentile(replans_ms, 0.75);
  row.travel_median_s = percentile(travel, 0.5);
  row.travel_p25_s = percentile(travel, 0.25);
  row.travel_p75_s = percentile(travel, 0.75);
  return row;
}

std::uint64_t trial_seed(std::uint64_t base, int n_obstacles, double speed, int index) {
  const auto speed_key = static_cast<std::uint64_t>(std::llround(speed * 1000.0));
  const std::uint64_t config = mix64(static_cast<std::uint64_t>(n_obstacles)) ^ speed_key;
  return derive_seed(base, config, static_cast<std::uint64_t>(index));
}

std::vector<std::vector<TrialResult>> run_grid(const ScenarioConfig& base, const BenchOptions& opts) {
  struct Task {
    std::size_t config;
    int trial;
  };
  std::vector<ScenarioConfig> configs;
  for (const int n : opts.counts) {
    for (const double v : opts.speeds) {
      ScenarioConfig cfg = base;
      cfg.obstacle_count = n;
      cfg.obstacle_speed = v;
      configs.push_back(std::move(cfg));
    }
  }
  std::vector<Task> tasks;
  std::vector<std::vector<TrialResult>> results(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    results[c].resize(static_cast<std::size_t>(opts.trials));
    for (int k = 0; k < opts.trials; ++k) {
      tasks.push_back({c, k});
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) {
        return;
      }
      const Task task = tasks[i];
      const ScenarioConfig& cfg = configs[task.config];
      try {
        results[task.config][static_cast<std::size_t>(task.trial)] =
            run_trial(cfg, trial_seed(cfg.seed, cfg.obstacle_count, cfg.obstacle_speed, task.trial));
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next.store(tasks.size());
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (opts.progress) {
        opts.progress(finished, tasks.size());
      }
    }
  };

  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) {
      pool.emplace_back(worker);
    }
    for (std::thread& th : pool) {
      th.join();
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
  return results;
}

std::vector<BenchRow> run_bench(const ScenarioConfig& base, const BenchOptions& opts) {
  const auto results = run_grid(base, opts);
  std::vector<BenchRow> rows;
  std::size_t c = 0;
  for (const int n : opts.counts) {
    for (const double v : opts.speeds) {
      rows.push_back(summarize(n, v, results[c++]));
    }
  }
  return rows;
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) {
    return "nan";
  }
  return fmt::format("{:.6f}", v);
}

}  // namespace

void write_csv(std::ostream& out, std::span<const BenchRow> rows) {
  fmt::print(out,
             "n_obstacles,speed,trials,success_rate,replan_mean_ms,replan_median_ms,replan_p25_ms,replan_p75_ms,"
             "travel_median_s,travel_p25_s,travel_p75_s\n");
  for (const BenchRow& r : rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", r.n_obstacles, num(r.speed), r.trials, num(r.success_rate),
               num(r.replan_mean_ms), num(r.replan_median_ms), num(r.replan_p25_ms), num(r.replan_p75_ms),
               num(r.travel_median_s), num(r.travel_p25_s), num(r.travel_p75_s));
  }
}

}  // namespace smart
