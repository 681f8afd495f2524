#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "sagsim/simulation.hpp"

namespace sagsim {
namespace {

const MetricSeries& series_for(const std::vector<MetricSeries>& all, Scheme s) {
  for (const auto& m : all)
    if (m.scheme == s) return m;
  throw std::logic_error("scheme not run");
}

const SummaryStats& stats_for(const std::vector<SummaryStats>& all, Scheme s) {
  for (const auto& m : all)
    if (m.scheme == s) return m;
  throw std::logic_error("scheme not run");
}

TEST(RunScenario, OptimalDominatesPerStep) {
  ScenarioConfig c;
  const auto run = run_scenario(c);
  ASSERT_EQ(run.size(), 3u);
  const auto& opt = series_for(run, Scheme::optimal);
  const auto& gr = series_for(run, Scheme::greedy);
  const auto& rnd = series_for(run, Scheme::random);
  ASSERT_EQ(opt.per_step.size(), gr.per_step.size());
  for (std::size_t i = 0; i < opt.per_step.size(); ++i) {
    EXPECT_GE(opt.per_step[i].average_strength, gr.per_step[i].average_strength);
    EXPECT_GE(opt.per_step[i].average_strength, rnd.per_step[i].average_strength);
  }
  EXPECT_GE(opt.time_mean, gr.time_mean);
  EXPECT_GE(opt.time_mean, rnd.time_mean);
}

TEST(RunScenario, StepGrid) {
  ScenarioConfig c;
  c.duration_s = 60.0;
  auto run = run_scenario(c);
  ASSERT_EQ(run[0].per_step.size(), 1u);
  EXPECT_EQ(run[0].per_step[0].t_s, 0.0);
  EXPECT_EQ(run[0].time_mean, run[0].per_step[0].average_strength);

  c.duration_s = 600.0;
  run = run_scenario(c);
  ASSERT_EQ(run[0].per_step.size(), 10u);
  EXPECT_EQ(run[0].per_step.back().t_s, 540.0);

  c.duration_s = std::nullopt;
  run = run_scenario(c);
  EXPECT_EQ(run[0].per_step.size(),
            static_cast<std::size_t>(std::ceil(c.relative_period_s() / 60.0)));
}

TEST(RunScenario, BitIdenticalReruns) {
  ScenarioConfig c;
  c.scheme_seeds = {3, 4, 5};
  EXPECT_EQ(run_scenario(c), run_scenario(c));
  ScenarioConfig other = c;
  other.scheme_seeds = {6};
  EXPECT_NE(series_for(run_scenario(c), Scheme::random),
            series_for(run_scenario(other), Scheme::random));
}

TEST(RunScenario, FractionsAndStrengthBounded) {
  ScenarioConfig c;
  c.beam_cap = 1;
  for (const auto& s : run_scenario(c)) {
    for (const auto& m : s.per_step) {
      EXPECT_GE(m.assigned_fraction, 0.0);
      EXPECT_LE(m.assigned_fraction, 6.0 / 50.0 + 1e-12);
      EXPECT_GE(m.average_strength, 0.0);
      EXPECT_LE(m.average_strength, m.assigned_fraction + 1e-12);
    }
  }
}

TEST(RunScenario, SingleHapSchemesAgreeWhenAtMostOneSatelliteVisible) {
  ScenarioConfig c;
  c.num_haps = 1;
  c.hap_sites = {{0, 5.0, 17.0, 20.0}};
  const auto sites = hap_sites(c);
  const auto run = run_scenario(c);
  const auto& opt = series_for(run, Scheme::optimal);
  int compared = 0;
  for (std::size_t i = 0; i < opt.per_step.size(); ++i) {
    if (build_visibility_graph(c, sites, opt.per_step[i].t_s).edges.size() > 1) continue;
    for (const auto& s : run) EXPECT_EQ(s.per_step[i], opt.per_step[i]);
    ++compared;
  }
  EXPECT_GT(compared, 0);
}

TEST(Replicate, IdenticalSeedsHaveZeroSpread) {
  ScenarioConfig c;
  c.duration_s = 1800.0;
  const auto stats = replicate(c, {7, 7, 7});
  for (const auto& s : stats) {
    EXPECT_EQ(s.stddev, 0.0);
    EXPECT_EQ(s.ci_low, s.mean);
    EXPECT_EQ(s.ci_high, s.mean);
    EXPECT_FALSE(s.degenerate);
  }
}

TEST(Replicate, SingleSeedIsDegenerate) {
  ScenarioConfig c;
  c.duration_s = 600.0;
  for (const auto& s : replicate(c, {2})) {
    EXPECT_TRUE(s.degenerate);
    EXPECT_EQ(s.replications, 1);
    EXPECT_EQ(s.ci_low, s.mean);
    EXPECT_EQ(s.ci_high, s.mean);
  }
  EXPECT_THROW(replicate(c, {}), InvalidParameter);
}

TEST(Replicate, ConfidenceIntervalOracle) {
  ScenarioConfig c;
  c.duration_s = 1200.0;
  c.schemes = {Scheme::optimal};
  const auto seeds = replication_seeds(10, 12);
  const auto s = replicate(c, seeds)[0];
  ASSERT_EQ(s.samples.size(), 12u);
  double mean = 0.0;
  for (double x : s.samples) mean += x;
  mean /= 12.0;
  double ss = 0.0;
  for (double x : s.samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / 11.0);
  EXPECT_NEAR(s.mean, mean, 1e-15);
  EXPECT_NEAR(s.stddev, sd, 1e-15);
  EXPECT_NEAR(s.ci_high - s.ci_low, 2 * 1.959963984540054 * sd / std::sqrt(12.0), 1e-14);
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    ScenarioConfig single = c;
    single.placement_seed = seeds[i];
    EXPECT_EQ(s.samples[i], run_scenario(single)[0].time_mean);
  }
}

TEST(Replicate, CiShrinksWithReplications) {
  ScenarioConfig c;
  c.duration_s = 1200.0;
  c.schemes = {Scheme::optimal};
  c.workers = 0;
  const auto small = replicate(c, replication_seeds(1, 8))[0];
  const auto large = replicate(c, replication_seeds(1, 32))[0];
  const double ratio = (small.ci_high - small.ci_low) / (large.ci_high - large.ci_low);
  EXPECT_GT(ratio, 1.2);
  EXPECT_LT(ratio, 3.5);
}

TEST(Replicate, WorkerCountDoesNotChangeOutput) {
  ScenarioConfig c;
  c.duration_s = 1800.0;
  const auto seeds = replication_seeds(5, 6);
  const auto serial = replicate(c, seeds);
  c.workers = 4;
  EXPECT_EQ(replicate(c, seeds), serial);
  c.workers = 0;
  EXPECT_EQ(replicate(c, seeds), serial);
}

TEST(Sweep, MonotoneInBeamCapPerReplication) {
  ScenarioConfig c;
  c.duration_s = 2400.0;
  c.workers = 0;
  const auto r = sweep_beam_cap(c, {1, 2, 3, 5, 8}, 6);
  ASSERT_EQ(r.per_value.size(), 5u);
  EXPECT_EQ(r.swept_param, "beam_cap");
  for (std::size_t v = 1; v < r.per_value.size(); ++v) {
    const auto& prev = stats_for(r.per_value[v - 1].stats, Scheme::optimal);
    const auto& cur = stats_for(r.per_value[v].stats, Scheme::optimal);
    for (std::size_t k = 0; k < cur.samples.size(); ++k) EXPECT_GE(cur.samples[k], prev.samples[k]);
    EXPECT_GE(cur.mean, prev.mean);
  }
}

TEST(Sweep, UnlimitedCapEqualsBestEdgeMean) {
  ScenarioConfig c;
  c.num_haps = 20;
  c.duration_s = 1200.0;
  c.schemes = {Scheme::optimal};
  const auto r = sweep_beam_cap(c, {20}, 1);
  const auto sites = hap_sites(c);
  double total = 0.0;
  int steps = 0;
  for (double t = 0.0; t < 1200.0; t += 60.0, ++steps) {
    const auto g = build_visibility_graph(c, sites, t);
    std::vector<double> best(g.num_haps, 0.0);
    for (const auto& e : g.edges) best[e.hap] = std::max(best[e.hap], e.weight);
    double sum = 0.0;
    for (double b : best) sum += b;
    total += sum / g.num_haps;
  }
  EXPECT_NEAR(r.per_value[0].stats[0].mean, total / steps, 1e-12);
}

TEST(Sweep, NumHapsAndErrors) {
  ScenarioConfig c;
  c.duration_s = 600.0;
  const auto r = sweep_num_haps(c, {10, 20}, 2);
  EXPECT_EQ(r.values, (std::vector<int>{10, 20}));
  EXPECT_EQ(r.per_value[1].value, 20);
  EXPECT_THROW(sweep(c, "beam_cap", {}, 2), InvalidParameter);
  EXPECT_THROW(sweep(c, "timestep_s", {1}, 2), InvalidParameter);
  EXPECT_THROW(sweep(c, "beam_cap", {0}, 2), InvalidParameter);
  EXPECT_THROW(sweep(c, "beam_cap", {1}, 0), InvalidParameter);
}

TEST(Exports, CsvShapes) {
  ScenarioConfig c;
  c.duration_s = 180.0;
  const auto run = run_scenario(c);
  const std::string summary = run_summary_csv(run);
  EXPECT_EQ(summary.rfind("scheme,time_mean,assigned_fraction_mean,steps\n", 0), 0u);
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 4);
  const std::string steps = run_steps_csv(run);
  EXPECT_EQ(steps.rfind("scheme,step,t_s,average_strength,assigned_fraction\n", 0), 0u);
  EXPECT_EQ(std::count(steps.begin(), steps.end(), '\n'), 1 + 3 * 3);

  const auto r = sweep_beam_cap(c, {1, 2}, 2);
  const std::string csv = sweep_csv(r);
  EXPECT_EQ(csv.rfind("swept_param,value,scheme,mean,ci_low,ci_high,replications\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 3);
  const auto j = sweep_json(r);
  EXPECT_EQ(j["swept_param"], "beam_cap");
  EXPECT_EQ(run_json(run).size(), 3u);
}

}  // namespace
}  // namespace sagsim
