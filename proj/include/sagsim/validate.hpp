#pragma once

// Self-check of the optimal solver against exhaustive enumeration on seeded
// random instances small enough to enumerate.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sagsim/io.hpp"
#include "sagsim/matching.hpp"
#include "sagsim/rng.hpp"

namespace sagsim {

struct SmallInstance {
  VisibilityGraph graph;
  int beam_cap = 1;
};

struct InstanceLimits {
  int max_sats = 4;
  int max_haps = 6;
  int max_beam_cap = 2;
  double edge_probability = 0.6;
};

/// Instance `index` of the validation set drawn from `seed`. Half of the
/// instances use weights from {0.25, 0.5, 0.75, 1} so that tied optima occur.
inline SmallInstance random_small_instance(std::uint64_t seed, std::uint64_t index,
                                           const InstanceLimits& limits = {}) {
  Rng rng(mix_seeds(seed, index));
  const int sats = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(limits.max_sats)));
  const int haps = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(limits.max_haps)));
  const int cap = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(limits.max_beam_cap)));
  const bool quantized = rng.below(2) == 0;
  std::vector<LinkEdge> edges;
  for (int h = 0; h < haps; ++h)
    for (int s = 0; s < sats; ++s) {
      if (!(rng.uniform() < limits.edge_probability)) continue;
      const double w = quantized ? 0.25 * static_cast<double>(1 + rng.below(4))
                                 : rng.uniform_open_closed();
      edges.push_back({s, h, w});
    }
  return {VisibilityGraph::make(sats, haps, std::move(edges)), cap};
}

using Solver = std::function<Assignment(const VisibilityGraph&, int)>;

struct ValidationFailure {
  std::uint64_t index = 0;
  std::string reason;
};

struct ValidationReport {
  std::uint64_t seed = 0;
  int passed = 0;
  int failed = 0;
  std::vector<ValidationFailure> failures;

  [[nodiscard]] bool ok() const noexcept { return failed == 0; }
};

/// Runs `solver` on `instances` random instances and checks feasibility of
/// both its result and the oracle's, and bit-equal totals.
inline ValidationReport validate_solver(const Solver& solver, int instances, std::uint64_t seed,
                                        const InstanceLimits& limits = {}) {
  ValidationReport report;
  report.seed = seed;
  for (int i = 0; i < instances; ++i) {
    const auto index = static_cast<std::uint64_t>(i);
    const auto inst = random_small_instance(seed, index, limits);
    std::string reason;
    try {
      const Assignment got = solver(inst.graph, inst.beam_cap);
      const Assignment want = brute_force_assignment(inst.graph, inst.beam_cap);
      if (auto v = check_assignment(inst.graph, got)) {
        reason = "feasibility: " + *v;
      } else if (auto w = check_assignment(inst.graph, want)) {
        reason = "oracle feasibility: " + *w;
      } else if (got.total_weight != want.total_weight) {
        reason = "total " + format_double(got.total_weight) + " != oracle " +
                 format_double(want.total_weight);
      }
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    if (reason.empty()) {
      ++report.passed;
    } else {
      ++report.failed;
      report.failures.push_back({index, reason + " (" + std::to_string(inst.graph.num_sats) +
                                            " sats, " + std::to_string(inst.graph.num_haps) +
                                            " haps, cap " + std::to_string(inst.beam_cap) + ")"});
    }
  }
  return report;
}

}  // namespace sagsim
