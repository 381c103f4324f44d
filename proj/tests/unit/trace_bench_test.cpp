#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "smart/bench.hpp"
#include "smart/svg.hpp"
#include "smart/trace.hpp"

using namespace smart;

namespace {

ScenarioConfig small_scenario() {
  ScenarioConfig cfg;
  cfg.map = StaticMap(Tiling({0, 0}, 16, 16, 1));
  cfg.map.set_occupied({8, 8}, true);
  cfg.start = {1.5, 1.5};
  cfg.goal = {14.5, 14.5};
  cfg.obstacle_count = 5;
  cfg.obstacle_speed = 3.0;
  cfg.planner.rrt_samples = 400;
  return cfg;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("trace round trip") {
  const ScenarioConfig cfg = small_scenario();
  std::stringstream buf;
  TrialResult result;
  std::uint64_t seed = 0;
  // Find a trial that replans at least once.
  for (; seed < 40; ++seed) {
    buf = std::stringstream();
    TraceWriter writer(buf, cfg.clock);
    result = run_trial(cfg, seed, &writer);
    if (result.replan_count > 0) {
      break;
    }
  }
  REQUIRE(result.replan_count > 0);
  const std::string text = buf.str();
  CHECK(count(text, "\nTICK ") == result.ticks);

  std::istringstream in(text);
  const TraceData trace = read_trace(in);
  CHECK(trace.ticks.size() == result.ticks);
  CHECK(trace.static_cells.size() == 1);
  REQUIRE(trace.result.has_value());

  std::size_t replans = 0;
  for (std::size_t i = 0; i < trace.ticks.size(); ++i) {
    if (!trace.ticks[i].replanned) {
      continue;
    }
    ++replans;
    const TreeSnapshot snap = replay(trace, i);
    for (std::size_t n = 0; n < snap.parents.size(); ++n) {
      if (snap.parents[n] >= 0) {
        CHECK(snap.active[n]);
        CHECK(snap.active[static_cast<std::size_t>(snap.parents[n])]);
      }
    }
    const std::string svg = render_snapshot(trace, i);
    CHECK(count(svg, "class=\"cobot\"") == 1);
    CHECK(count(svg, "class=\"cpr\"") == trace.ticks[i].cpr.size());
  }
  CHECK(replans == result.replan_count);
  CHECK(count(render_snapshot(trace, 0), "class=\"cobot\"") == 1);
  CHECK_THROWS_AS(replay(trace, trace.ticks.size()), TraceError);
}

TEST_CASE("malformed traces are rejected") {
  std::istringstream wrong_magic("NOT-A-TRACE\n");
  CHECK_THROWS_AS(read_trace(wrong_magic), TraceError);
  std::istringstream bad_number("SMART-TRACE 1\nWORKSPACE 0 0 abc 4 1\n");
  CHECK_THROWS_AS(read_trace(bad_number), TraceError);
  std::istringstream unknown("SMART-TRACE 1\nWORKSPACE 0 0 4 4 1\nBOGUS 1\n");
  CHECK_THROWS_AS(read_trace(unknown), TraceError);
}

TEST_CASE("percentiles") {
  CHECK(std::isnan(percentile({}, 0.5)));
  CHECK(percentile({4.0}, 0.25) == 4.0);
  CHECK(percentile({3, 1, 2, 4}, 0.5) == 2.5);
  CHECK(percentile({0, 10}, 0.25) == 2.5);
}

TEST_CASE("summaries") {
  TrialResult ok;
  ok.success = true;
  ok.travel_time = 12.5;
  ok.replanning_times = {0.002};
  const BenchRow one = summarize(10, 2.0, std::span<const TrialResult>(&ok, 1));
  CHECK(one.success_rate == 1.0);
  CHECK(one.travel_median_s == 12.5);
  CHECK(one.travel_p25_s == 12.5);
  CHECK(one.replan_median_ms == doctest::Approx(2.0));

  TrialResult crash;
  crash.collision = true;
  crash.travel_time = 99.0;
  const std::vector<TrialResult> both{ok, crash};
  const BenchRow two = summarize(10, 2.0, both);
  CHECK(two.success_rate == 0.5);
  CHECK(two.travel_median_s == 12.5);

  std::ostringstream csv;
  write_csv(csv, std::vector<BenchRow>{summarize(3, 1.0, {})});
  CHECK(csv.str() ==
        "n_obstacles,speed,trials,success_rate,replan_mean_ms,replan_median_ms,replan_p25_ms,replan_p75_ms,"
        "travel_median_s,travel_p25_s,travel_p75_s\n3,1.000000,0,0.000000,nan,nan,nan,nan,nan,nan,nan\n");
}

TEST_CASE("bench grid shape") {
  ScenarioConfig cfg = small_scenario();
  BenchOptions opts;
  opts.counts = {10};
  opts.speeds = {1, 2, 3, 4};
  opts.trials = 1;
  const auto rows = run_bench(cfg, opts);
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].n_obstacles == 10);
    CHECK(rows[i].speed == opts.speeds[i]);
    CHECK(rows[i].trials == 1);
  }
}

TEST_CASE("trial seeds differ across configurations") {
  CHECK(trial_seed(1, 10, 1.0, 0) != trial_seed(1, 10, 2.0, 0));
  CHECK(trial_seed(1, 10, 1.0, 0) != trial_seed(1, 15, 1.0, 0));
  CHECK(trial_seed(1, 10, 1.0, 0) != trial_seed(1, 10, 1.0, 1));
  CHECK(trial_seed(1, 10, 1.0, 3) == trial_seed(1, 10, 1.0, 3));
}
