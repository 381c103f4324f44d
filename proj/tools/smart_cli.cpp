// Command-line front end: run one trial, run a benchmark grid, or render a
// trace frame as SVG.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "smart/bench.hpp"
#include "smart/scenario.hpp"
#include "smart/sim.hpp"
#include "smart/svg.hpp"
#include "smart/trace.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("smart");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SMART_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level != spdlog::level::off || std::string(env) == "off") {
      spdlog::set_level(level);
    } else {
      spdlog::warn("ignoring unknown SMART_LOG level '{}'", env);
    }
  }
}

struct CommonOptions {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  bool ideal_replan = false;
  std::string replan_clock;
};

smart::ScenarioConfig load(const CommonOptions& o) {
  smart::ScenarioConfig cfg = smart::load_scenario(o.scenario);
  if (o.seed) {
    cfg.seed = *o.seed;
  }
  if (!o.replan_clock.empty()) {
    if (o.replan_clock == "wall") {
      cfg.clock.mode = smart::ClockMode::wall;
    } else if (o.replan_clock == "model") {
      cfg.clock.mode = smart::ClockMode::model;
    } else if (o.replan_clock == "ideal") {
      cfg.clock.mode = smart::ClockMode::ideal;
    } else {
      throw smart::ConfigError(fmt::format("--replan-clock must be wall, model or ideal, got '{}'", o.replan_clock));
    }
  }
  if (o.ideal_replan) {
    cfg.clock.mode = smart::ClockMode::ideal;
  }
  return cfg;
}

int cmd_run(const CommonOptions& common, const std::string& trace_path) {
  const smart::ScenarioConfig cfg = load(common);
  spdlog::info("running one trial, seed {}", cfg.seed);
  smart::TrialResult result;
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) {
      spdlog::error("cannot open trace file {}", trace_path);
      return kRuntimeError;
    }
    smart::TraceWriter writer(out, cfg.clock);
    result = smart::run_trial(cfg, cfg.seed, &writer);
  } else {
    result = smart::run_trial(cfg, cfg.seed);
  }
  const double median_ms = smart::percentile(result.replanning_times, 0.5) * 1e3;
  fmt::print("success={} collision={} timeout={} travel_time_s={} replans={} failed_ticks={} ticks={} "
             "replan_median_ms={}\n",
             result.success ? 1 : 0, result.collision ? 1 : 0, result.timeout ? 1 : 0,
             result.success ? fmt::format("{:.4f}", result.travel_time) : std::string("nan"), result.replan_count,
             result.failed_ticks, result.ticks,
             result.replanning_times.empty() ? std::string("nan") : fmt::format("{:.4f}", median_ms));
  return kOk;
}

int cmd_bench(const CommonOptions& common, int trials, int jobs, const std::string& out_path,
              const std::vector<double>& speeds, const std::vector<int>& counts) {
  const smart::ScenarioConfig cfg = load(common);
  smart::BenchOptions opts;
  opts.counts = counts.empty() ? cfg.bench_counts : counts;
  opts.speeds = speeds.empty() ? cfg.bench_speeds : speeds;
  opts.trials = trials > 0 ? trials : cfg.trials;
  opts.jobs = jobs;
  opts.progress = [](std::size_t done, std::size_t total) { spdlog::debug("trial {}/{}", done, total); };
  if (opts.counts.empty() || opts.speeds.empty()) {
    throw smart::ConfigError("bench grid is empty");
  }
  spdlog::info("bench: {} configurations x {} trials on {} jobs", opts.counts.size() * opts.speeds.size(),
               opts.trials, opts.jobs);
  const auto rows = smart::run_bench(cfg, opts);
  if (out_path.empty()) {
    smart::write_csv(std::cout, rows);
    return kOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    spdlog::error("cannot open {}", out_path);
    return kRuntimeError;
  }
  smart::write_csv(out, rows);
  return kOk;
}

int cmd_snapshot(const std::string& trace_path, std::size_t tick, const std::string& out_path) {
  std::ifstream in(trace_path);
  if (!in) {
    fmt::print(std::cerr, "error: trace not found: {}\n", trace_path);
    return kUsageError;
  }
  const smart::TraceData trace = smart::read_trace(in);
  const std::string svg = smart::render_snapshot(trace, tick);
  if (out_path.empty()) {
    std::cout << svg;
    return kOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    spdlog::error("cannot open {}", out_path);
    return kRuntimeError;
  }
  out << svg;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Real-time replanning among moving obstacles: simulator and benchmark"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string trace_path;
  std::string out_path;
  int trials = 0;
  int jobs = 1;
  std::vector<double> speeds;
  std::vector<int> counts;
  std::size_t tick = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", common.scenario, "Scenario JSON file")->required();
    sub->add_option("--seed", common.seed, "Override the scenario base seed");
    sub->add_flag("--ideal-replan", common.ideal_replan, "Charge zero time for replanning");
    sub->add_option("--replan-clock", common.replan_clock, "Replanning time charge: model, wall or ideal");
  };

  CLI::App* run = app.add_subcommand("run", "Run one trial and print its result");
  add_common(run);
  run->add_option("--trace", trace_path, "Write a replay trace");

  CLI::App* bench = app.add_subcommand("bench", "Run the obstacle count x speed grid and write CSV");
  add_common(bench);
  bench->add_option("--trials", trials, "Trials per configuration (default: scenario value)")
      ->check(CLI::PositiveNumber);
  bench->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--out", out_path, "CSV output path (default: stdout)");
  bench->add_option("--speeds", speeds, "Obstacle speeds, m/s")->delimiter(',');
  bench->add_option("--counts", counts, "Obstacle counts")->delimiter(',');

  CLI::App* snapshot = app.add_subcommand("snapshot", "Render one trace tick as SVG");
  snapshot->add_option("--trace", trace_path, "Trace file")->required();
  snapshot->add_option("--tick", tick, "Tick index (0-based)");
  snapshot->add_option("--out", out_path, "SVG output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (run->parsed()) {
      return cmd_run(common, trace_path);
    }
    if (bench->parsed()) {
      return cmd_bench(common, trials, jobs, out_path, speeds, counts);
    }
    return cmd_snapshot(trace_path, tick, out_path);
  } catch (const smart::NotFoundError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kUsageError;
  } catch (const smart::ConfigError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kUsageError;
  } catch (const smart::TraceError& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kRuntimeError;
  } catch (const std::exception& e) {
    fmt::print(std::cerr, "error: {}\n", e.what());
    return kRuntimeError;
  }
}
