#pragma once

// Time-stepped evaluation of the link-establishment schemes, replication
// over placement seeds, and the beam-cap / HAP-count sweeps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "sagsim/errors.hpp"
#include "sagsim/io.hpp"
#include "sagsim/matching.hpp"
#include "sagsim/rng.hpp"
#include "sagsim/scenario.hpp"

namespace sagsim {

struct StepMetric {
  double t_s = 0.0;
  double average_strength = 0.0;
  double assigned_fraction = 0.0;

  friend bool operator==(const StepMetric&, const StepMetric&) = default;
};

struct MetricSeries {
  Scheme scheme = Scheme::optimal;
  std::vector<StepMetric> per_step;
  double time_mean = 0.0;
  double assigned_fraction_mean = 0.0;

  friend bool operator==(const MetricSeries&, const MetricSeries&) = default;
};

/// Per-scheme statistics of time_mean across replications.
struct SummaryStats {
  Scheme scheme = Scheme::optimal;
  double mean = 0.0;
  double stddev = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int replications = 0;
  bool degenerate = false;    // single replication: the CI is the point estimate
  std::vector<double> samples;  // time_mean of each replication, in seed order

  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

struct SweepCell {
  int value = 0;
  std::vector<SummaryStats> stats;  // in ScenarioConfig::schemes order

  friend bool operator==(const SweepCell&, const SweepCell&) = default;
};

struct SweepResult {
  std::string swept_param;
  std::vector<int> values;
  std::vector<SweepCell> per_value;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

inline constexpr double kNormalQuantile975 = 1.959963984540054;

namespace detail {

/// Calls fn(i) for i in [0, n) on up to `workers` threads (0 = hardware
/// concurrency). Rethrows the first exception after all threads finish.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  std::size_t threads = workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                     : static_cast<std::size_t>(workers);
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

// Offsets from the first sample, so identical samples give that sample back
// exactly.
inline double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x - xs.front();
  return xs.front() + sum / static_cast<double>(xs.size());
}

inline SummaryStats summarize(Scheme scheme, std::vector<double> samples) {
  SummaryStats s;
  s.scheme = scheme;
  s.replications = static_cast<int>(samples.size());
  s.mean = mean_of(samples);
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(samples.size() - 1));
    const double half = kNormalQuantile975 * s.stddev / std::sqrt(static_cast<double>(samples.size()));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
  } else {
    s.degenerate = true;
    s.ci_low = s.ci_high = s.mean;
  }
  s.samples = std::move(samples);
  return s;
}

}  // namespace detail

/// Evaluates every enabled scheme at t = 0, dt, 2dt, ... < duration on one
/// shared visibility graph per step. The random scheme's value at a step is
/// the mean over scheme_seeds, each seeded mix_seeds(seed, step).
inline std::vector<MetricSeries> run_scenario(const ScenarioConfig& config) {
  config.validate();
  const auto sites = hap_sites(config);
  const double duration = config.effective_duration_s();

  std::vector<MetricSeries> series(config.schemes.size());
  for (std::size_t i = 0; i < series.size(); ++i) series[i].scheme = config.schemes[i];

  for (std::uint64_t step = 0;; ++step) {
    const double t = static_cast<double>(step) * config.timestep_s;
    if (!(t < duration)) break;
    const VisibilityGraph graph = build_visibility_graph(config, sites, t);
    for (auto& s : series) {
      StepMetric m{t, 0.0, 0.0};
      auto record = [&](const Assignment& a) {
        return std::pair(average_strength(a, config.num_haps),
                         static_cast<double>(a.assigned_count()) / config.num_haps);
      };
      switch (s.scheme) {
        case Scheme::optimal:
          std::tie(m.average_strength, m.assigned_fraction) =
              record(optimal_assignment(graph, config.beam_cap));
          break;
        case Scheme::greedy:
          std::tie(m.average_strength, m.assigned_fraction) =
              record(greedy_assignment(graph, config.beam_cap, config.greedy_order));
          break;
        case Scheme::oracle:
          std::tie(m.average_strength, m.assigned_fraction) =
              record(brute_force_assignment(graph, config.beam_cap));
          break;
        case Scheme::random: {
          double strength = 0.0;
          double fraction = 0.0;
          for (std::uint64_t seed : config.scheme_seeds) {
            auto [st, fr] = record(random_assignment(graph, config.beam_cap, mix_seeds(seed, step)));
            strength += st;
            fraction += fr;
          }
          const auto k = static_cast<double>(config.scheme_seeds.size());
          m.average_strength = strength / k;
          m.assigned_fraction = fraction / k;
          break;
        }
      }
      s.per_step.push_back(m);
    }
  }

  for (auto& s : series) {
    double strength = 0.0;
    double fraction = 0.0;
    for (const auto& m : s.per_step) {
      strength += m.average_strength;
      fraction += m.assigned_fraction;
    }
    const auto n = static_cast<double>(s.per_step.size());
    s.time_mean = strength / n;
    s.assigned_fraction_mean = fraction / n;
  }
  return series;
}

/// Mean, sample standard deviation and normal-approximation 95% CI of each
/// scheme's time_mean, with replication i using placement seed seeds[i].
inline std::vector<SummaryStats> replicate(const ScenarioConfig& config,
                                           const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw InvalidParameter("seeds", "must not be empty");
  config.validate();
  std::vector<std::vector<MetricSeries>> runs(seeds.size());
  detail::parallel_for(seeds.size(), config.workers, [&](std::size_t i) {
    ScenarioConfig c = config;
    c.placement_seed = seeds[i];
    runs[i] = run_scenario(c);
  });
  std::vector<SummaryStats> out;
  for (std::size_t k = 0; k < config.schemes.size(); ++k) {
    std::vector<double> samples;
    for (const auto& run : runs) samples.push_back(run[k].time_mean);
    out.push_back(detail::summarize(config.schemes[k], std::move(samples)));
  }
  return out;
}

inline std::vector<std::uint64_t> replication_seeds(std::uint64_t base_seed, int replications) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < replications; ++i) seeds.push_back(base_seed + static_cast<std::uint64_t>(i));
  return seeds;
}

inline constexpr const char* kSupportedSweepParams = "beam_cap, num_haps";

/// Sweeps `param` (beam_cap or num_haps) over `values`; each value is
/// replicated over placement seeds base_seed + 0 .. base_seed + replications - 1.
inline SweepResult sweep(const ScenarioConfig& base, const std::string& param,
                         const std::vector<int>& values, int replications) {
  if (param != "beam_cap" && param != "num_haps")
    throw InvalidParameter("sweep.param", std::string("must be one of: ") + kSupportedSweepParams);
  if (values.empty()) throw InvalidParameter("sweep.values", "must not be empty");
  for (int v : values)
    if (v < 1) throw InvalidParameter(param, "must be >= 1");
  if (replications < 1) throw InvalidParameter("sweep.replications", "must be >= 1");
  if (param == "num_haps" && !base.hap_sites.empty())
    throw InvalidParameter("hap_sites", "explicit sites cannot be combined with a num_haps sweep");
  base.validate();

  std::vector<ScenarioConfig> configs;
  for (int v : values) {
    ScenarioConfig c = base;
    (param == "beam_cap" ? c.beam_cap : c.num_haps) = v;
    c.validate();
    configs.push_back(std::move(c));
  }
  const auto seeds = replication_seeds(base.placement_seed, replications);
  const std::size_t reps = seeds.size();
  std::vector<std::vector<MetricSeries>> runs(configs.size() * reps);
  detail::parallel_for(runs.size(), base.workers, [&](std::size_t i) {
    ScenarioConfig c = configs[i / reps];
    c.placement_seed = seeds[i % reps];
    runs[i] = run_scenario(c);
  });

  SweepResult result{param, values, {}};
  for (std::size_t v = 0; v < configs.size(); ++v) {
    SweepCell cell{values[v], {}};
    for (std::size_t k = 0; k < base.schemes.size(); ++k) {
      std::vector<double> samples;
      for (std::size_t r = 0; r < reps; ++r) samples.push_back(runs[v * reps + r][k].time_mean);
      cell.stats.push_back(detail::summarize(base.schemes[k], std::move(samples)));
    }
    result.per_value.push_back(std::move(cell));
  }
  return result;
}

inline SweepResult sweep_beam_cap(const ScenarioConfig& base, const std::vector<int>& caps,
                                  int replications) {
  return sweep(base, "beam_cap", caps, replications);
}

inline SweepResult sweep_num_haps(const ScenarioConfig& base, const std::vector<int>& hap_counts,
                                  int replications) {
  return sweep(base, "num_haps", hap_counts, replications);
}

// Exports. Numbers use the shortest round-trip decimal form, so the text is
// a pure function of the values.

inline std::string sweep_csv(const SweepResult& r) {
  std::string out = "swept_param,value,scheme,mean,ci_low,ci_high,replications\n";
  for (const auto& cell : r.per_value)
    for (const auto& s : cell.stats)
      out += r.swept_param + ',' + std::to_string(cell.value) + ',' +
             std::string(to_string(s.scheme)) + ',' + format_double(s.mean) + ',' +
             format_double(s.ci_low) + ',' + format_double(s.ci_high) + ',' +
             std::to_string(s.replications) + '\n';
  return out;
}

inline nlohmann::json to_json(const SummaryStats& s) {
  return {{"scheme", to_string(s.scheme)}, {"mean", s.mean},           {"stddev", s.stddev},
          {"ci_low", s.ci_low},            {"ci_high", s.ci_high},     {"replications", s.replications},
          {"degenerate", s.degenerate},    {"samples", s.samples}};
}

inline nlohmann::json sweep_json(const SweepResult& r) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& cell : r.per_value) {
    nlohmann::json stats = nlohmann::json::object();
    for (const auto& s : cell.stats) stats[std::string(to_string(s.scheme))] = to_json(s);
    cells.push_back({{"value", cell.value}, {"schemes", std::move(stats)}});
  }
  return {{"swept_param", r.swept_param}, {"values", r.values}, {"per_value", std::move(cells)}};
}

inline std::string run_summary_csv(const std::vector<MetricSeries>& series) {
  std::string out = "scheme,time_mean,assigned_fraction_mean,steps\n";
  for (const auto& s : series)
    out += std::string(to_string(s.scheme)) + ',' + format_double(s.time_mean) + ',' +
           format_double(s.assigned_fraction_mean) + ',' + std::to_string(s.per_step.size()) + '\n';
  return out;
}

inline std::string run_steps_csv(const std::vector<MetricSeries>& series) {
  std::string out = "scheme,step,t_s,average_strength,assigned_fraction\n";
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.per_step.size(); ++i)
      out += std::string(to_string(s.scheme)) + ',' + std::to_string(i) + ',' +
             format_double(s.per_step[i].t_s) + ',' +
             format_double(s.per_step[i].average_strength) + ',' +
             format_double(s.per_step[i].assigned_fraction) + '\n';
  return out;
}

inline nlohmann::json run_json(const std::vector<MetricSeries>& series) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : series) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& m : s.per_step)
      steps.push_back({{"t_s", m.t_s},
                       {"average_strength", m.average_strength},
                       {"assigned_fraction", m.assigned_fraction}});
    out.push_back({{"scheme", to_string(s.scheme)},
                   {"time_mean", s.time_mean},
                   {"assigned_fraction_mean", s.assigned_fraction_mean},
                   {"per_step", std::move(steps)}});
  }
  return out;
}

}  // namespace sagsim
