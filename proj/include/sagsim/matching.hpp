#pragma once

// Per-timestep link establishment between HAPs and satellite beams.
//
// Every scheme produces an Assignment: each HAP connects to at most one
// visible satellite and each satellite serves at most `beam_cap` HAPs.
// The optimal scheme maximizes the total link weight exactly; greedy and
// random are the uncoordinated baselines; brute force is the enumeration
// oracle for small instances.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sagsim/errors.hpp"
#include "sagsim/geometry.hpp"
#include "sagsim/rng.hpp"
#include "sagsim/scenario.hpp"

namespace sagsim {

// Link weights are compared in 128-bit fixed point with 100 fractional bits,
// which represents every double weight >= 2^-48 exactly. Totals are therefore
// exact and independent of summation order.
__extension__ using ExactWeight = __int128;
inline constexpr int kExactFractionBits = 100;

inline ExactWeight to_exact(double weight) noexcept {
  return static_cast<ExactWeight>(std::ldexp(weight, kExactFractionBits));
}
inline double from_exact(ExactWeight value) noexcept {
  return std::ldexp(static_cast<double>(value), -kExactFractionBits);
}

struct LinkEdge {
  int sat = 0;
  int hap = 0;
  double weight = 0.0;

  friend bool operator==(const LinkEdge&, const LinkEdge&) = default;
};

/// Weighted bipartite HAP x satellite graph at one instant. Edges are kept
/// sorted by (hap, sat).
struct VisibilityGraph {
  int num_sats = 0;
  int num_haps = 0;
  std::vector<LinkEdge> edges;
  double timestamp_s = 0.0;

  /// Validates indices, weights in (0, 1] and pair uniqueness, then sorts.
  static VisibilityGraph make(int num_sats, int num_haps, std::vector<LinkEdge> edges,
                              double timestamp_s = 0.0) {
    if (num_sats < 0) throw InvalidParameter("num_sats", "must be >= 0");
    if (num_haps < 0) throw InvalidParameter("num_haps", "must be >= 0");
    for (const auto& e : edges) {
      if (e.sat < 0 || e.sat >= num_sats) throw InvalidParameter("edge.sat", "out of range");
      if (e.hap < 0 || e.hap >= num_haps) throw InvalidParameter("edge.hap", "out of range");
      if (!(e.weight > 0.0 && e.weight <= 1.0))
        throw InvalidParameter("edge.weight", "must be in (0, 1]");
    }
    std::sort(edges.begin(), edges.end(), [](const LinkEdge& a, const LinkEdge& b) {
      return std::pair(a.hap, a.sat) < std::pair(b.hap, b.sat);
    });
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (edges[i].hap == edges[i - 1].hap && edges[i].sat == edges[i - 1].sat)
        throw InvalidParameter("edges", "duplicate (sat, hap) pair");
    return {num_sats, num_haps, std::move(edges), timestamp_s};
  }

  [[nodiscard]] std::optional<double> weight(int hap, int sat) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), std::pair(hap, sat),
                               [](const LinkEdge& e, const std::pair<int, int>& key) {
                                 return std::pair(e.hap, e.sat) < key;
                               });
    if (it == edges.end() || it->hap != hap || it->sat != sat) return std::nullopt;
    return it->weight;
  }

  /// Edges incident to each HAP, as [begin, end) offsets into `edges`.
  [[nodiscard]] std::vector<std::size_t> hap_offsets() const {
    std::vector<std::size_t> offsets(static_cast<std::size_t>(num_haps) + 1, 0);
    for (const auto& e : edges) ++offsets[static_cast<std::size_t>(e.hap) + 1];
    for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
    return offsets;
  }

  friend bool operator==(const VisibilityGraph&, const VisibilityGraph&) = default;
};

struct Assignment {
  Scheme scheme = Scheme::optimal;
  int beam_cap = 1;
  std::vector<std::optional<int>> sat_for_hap;  // indexed by hap_id
  double total_weight = 0.0;

  [[nodiscard]] int assigned_count() const noexcept {
    return static_cast<int>(
        std::count_if(sat_for_hap.begin(), sat_for_hap.end(),
                      [](const std::optional<int>& s) { return s.has_value(); }));
  }

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Builds an Assignment and computes its total from the exact sum of the
/// assigned edge weights. The pairs are trusted to be edges of `graph`.
inline Assignment make_assignment(const VisibilityGraph& graph, Scheme scheme, int beam_cap,
                                  std::vector<std::optional<int>> sat_for_hap) {
  ExactWeight total = 0;
  for (int h = 0; h < static_cast<int>(sat_for_hap.size()); ++h)
    if (sat_for_hap[h])
      if (auto w = graph.weight(h, *sat_for_hap[h])) total += to_exact(*w);
  return {scheme, beam_cap, std::move(sat_for_hap), from_exact(total)};
}

/// Returns a description of the first violated Assignment invariant, or
/// nullopt if the assignment is feasible for `graph`.
inline std::optional<std::string> check_assignment(const VisibilityGraph& graph,
                                                   const Assignment& a) {
  if (static_cast<int>(a.sat_for_hap.size()) != graph.num_haps)
    return "assignment covers " + std::to_string(a.sat_for_hap.size()) + " HAPs, graph has " +
           std::to_string(graph.num_haps);
  std::vector<int> load(static_cast<std::size_t>(graph.num_sats), 0);
  double sum = 0.0;
  for (int h = 0; h < graph.num_haps; ++h) {
    if (!a.sat_for_hap[h]) continue;
    const int s = *a.sat_for_hap[h];
    if (s < 0 || s >= graph.num_sats)
      return "hap " + std::to_string(h) + " assigned to invalid satellite " + std::to_string(s);
    auto w = graph.weight(h, s);
    if (!w) return "pair (hap " + std::to_string(h) + ", sat " + std::to_string(s) + ") is not an edge";
    sum += *w;
    if (++load[s] > a.beam_cap)
      return "satellite " + std::to_string(s) + " exceeds beam cap " + std::to_string(a.beam_cap);
  }
  if (std::abs(sum - a.total_weight) > 1e-12 * std::max(1.0, std::abs(sum)))
    return "total_weight " + std::to_string(a.total_weight) + " differs from edge sum " +
           std::to_string(sum);
  return std::nullopt;
}

namespace detail {

/// Residual network with paired arcs; arc i ^ 1 is the reverse of arc i.
class ResidualNetwork {
 public:
  struct Arc {
    int from;
    int to;
    int cap;
    ExactWeight cost;
  };

  explicit ResidualNetwork(int num_nodes) : out_(static_cast<std::size_t>(num_nodes)) {}

  int add_arc(int from, int to, int cap, ExactWeight cost) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({from, to, cap, cost});
    arcs_.push_back({to, from, 0, -cost});
    out_[from].push_back(id);
    out_[to].push_back(id + 1);
    return id;
  }

  void push(int arc, int amount = 1) {
    arcs_[arc].cap -= amount;
    arcs_[arc ^ 1].cap += amount;
  }

  [[nodiscard]] int num_nodes() const noexcept { return static_cast<int>(out_.size()); }
  [[nodiscard]] const Arc& arc(int id) const { return arcs_[id]; }
  Arc& arc(int id) { return arcs_[id]; }
  [[nodiscard]] const std::vector<Arc>& arcs() const noexcept { return arcs_; }
  [[nodiscard]] std::span<const int> out(int node) const { return out_[node]; }

 private:
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
};

inline constexpr ExactWeight kUnreachable = std::numeric_limits<ExactWeight>::max() / 4;

}  // namespace detail

/// Maximum-weight one-to-many matching (HAP capacity 1, satellite capacity
/// beam_cap). Among all optima returns the lexicographically smallest
/// sat_for_hap vector, with "unassigned" ordered after every satellite.
///
/// Successive shortest augmenting paths on source -> HAP -> satellite -> sink
/// with costs -weight, stopping at the first path of non-negative cost (the
/// cost of min-cost flow is convex in the flow value, so that is the global
/// optimum over all flow values). Ties are then resolved by walking
/// zero-reduced-cost residual cycles HAP by HAP.
inline Assignment optimal_assignment(const VisibilityGraph& graph, int beam_cap) {
  if (beam_cap < 1) throw InvalidParameter("beam_cap", "must be >= 1");
  const int num_haps = graph.num_haps;
  const int num_sats = graph.num_sats;
  const int source = 0;
  const int sink = 1 + num_haps + num_sats;
  auto hap_node = [](int h) { return 1 + h; };
  auto sat_node = [num_haps](int s) { return 1 + num_haps + s; };

  detail::ResidualNetwork net(sink + 1);
  for (int h = 0; h < num_haps; ++h) net.add_arc(source, hap_node(h), 1, 0);
  std::vector<int> edge_arc;
  edge_arc.reserve(graph.edges.size());
  for (const auto& e : graph.edges)
    edge_arc.push_back(net.add_arc(hap_node(e.hap), sat_node(e.sat), 1, -to_exact(e.weight)));
  for (int s = 0; s < num_sats; ++s) net.add_arc(sat_node(s), sink, beam_cap, 0);

  const int n = net.num_nodes();
  // The initial network is a DAG, so feasible potentials follow directly.
  std::vector<ExactWeight> potential(static_cast<std::size_t>(n), 0);
  for (const auto& e : graph.edges)
    potential[sat_node(e.sat)] = std::min(potential[sat_node(e.sat)], -to_exact(e.weight));
  for (int s = 0; s < num_sats; ++s)
    potential[sink] = std::min(potential[sink], potential[sat_node(s)]);

  std::vector<ExactWeight> dist(static_cast<std::size_t>(n));
  std::vector<int> via(static_cast<std::size_t>(n));
  int flow = 0;
  for (;;) {
    std::fill(dist.begin(), dist.end(), detail::kUnreachable);
    std::fill(via.begin(), via.end(), -1);
    using Item = std::pair<ExactWeight, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0;
    heap.emplace(0, source);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d != dist[u]) continue;
      for (int id : net.out(u)) {
        const auto& a = net.arc(id);
        if (a.cap <= 0) continue;
        const ExactWeight nd = d + a.cost + potential[u] - potential[a.to];
        if (nd < dist[a.to]) {
          dist[a.to] = nd;
          via[a.to] = id;
          heap.emplace(nd, a.to);
        }
      }
    }
    if (dist[sink] == detail::kUnreachable) break;
    if (dist[sink] + potential[sink] - potential[source] >= 0) break;
    // Nodes unreachable now stay unreachable: augmentation only adds arcs
    // between reachable nodes.
    for (int v = 0; v < n; ++v)
      if (dist[v] != detail::kUnreachable) potential[v] += dist[v];
    for (int v = sink; v != source; v = net.arc(via[v]).from) net.push(via[v]);
    ++flow;
  }

  // Close the network into a circulation so residual cycles may also change
  // the number of assigned HAPs, then take potentials that certify
  // optimality on every residual arc.
  const int back = net.add_arc(sink, source, num_haps, 0);
  net.arc(back).cap = num_haps - flow;
  net.arc(back ^ 1).cap = flow;
  std::fill(potential.begin(), potential.end(), 0);
  for (int round = 0;; ++round) {
    bool changed = false;
    for (const auto& a : net.arcs()) {
      if (a.cap > 0 && potential[a.from] + a.cost < potential[a.to]) {
        potential[a.to] = potential[a.from] + a.cost;
        changed = true;
      }
    }
    if (!changed) break;
    if (round > n) throw std::logic_error("optimal_assignment: residual negative cycle");
  }
  auto tight = [&](int id) {
    const auto& a = net.arc(id);
    return a.cap > 0 && a.cost + potential[a.from] - potential[a.to] == 0;
  };

  const auto offsets = graph.hap_offsets();
  auto current_sat = [&](int h) -> std::optional<int> {
    for (std::size_t e = offsets[h]; e < offsets[h + 1]; ++e)
      if (net.arc(edge_arc[e]).cap == 0) return graph.edges[e].sat;
    return std::nullopt;
  };

  // HAP h may move to a smaller satellite index without losing weight iff a
  // tight residual path leads from that satellite back to h while avoiding
  // HAPs already fixed.
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::vector<int> frontier;
  for (int h = 0; h < num_haps; ++h) {
    const auto now = current_sat(h);
    for (std::size_t e = offsets[h]; e < offsets[h + 1]; ++e) {
      const int s = graph.edges[e].sat;
      if (now && s >= *now) break;
      if (!tight(edge_arc[e])) continue;
      std::fill(parent.begin(), parent.end(), -2);
      const int start = sat_node(s);
      const int target = hap_node(h);
      parent[start] = -1;
      frontier.assign(1, start);
      for (std::size_t i = 0; i < frontier.size() && parent[target] == -2; ++i) {
        const int u = frontier[i];
        for (int id : net.out(u)) {
          const int v = net.arc(id).to;
          if (parent[v] != -2 || !tight(id)) continue;
          if (v >= hap_node(0) && v < target) continue;  // fixed HAP
          parent[v] = id;
          if (v == target) break;
          frontier.push_back(v);
        }
      }
      if (parent[target] == -2) continue;
      for (int v = target; v != start; v = net.arc(parent[v]).from) net.push(parent[v]);
      net.push(edge_arc[e]);
      break;
    }
  }

  std::vector<std::optional<int>> sat_for_hap(static_cast<std::size_t>(num_haps));
  for (std::size_t e = 0; e < graph.edges.size(); ++e)
    if (net.arc(edge_arc[e]).cap == 0) sat_for_hap[graph.edges[e].hap] = graph.edges[e].sat;
  return make_assignment(graph, Scheme::optimal, beam_cap, std::move(sat_for_hap));
}

/// Myopic baseline: each HAP in turn takes its best visible satellite that
/// still has a free beam (ties by lowest sat index).
inline Assignment greedy_assignment(const VisibilityGraph& graph, int beam_cap,
                                    GreedyOrder order = GreedyOrder::by_index) {
  if (beam_cap < 1) throw InvalidParameter("beam_cap", "must be >= 1");
  const auto offsets = graph.hap_offsets();
  std::vector<int> haps(static_cast<std::size_t>(graph.num_haps));
  for (int h = 0; h < graph.num_haps; ++h) haps[h] = h;
  if (order == GreedyOrder::best_weight_first) {
    std::vector<double> best(haps.size(), 0.0);
    for (const auto& e : graph.edges) best[e.hap] = std::max(best[e.hap], e.weight);
    std::stable_sort(haps.begin(), haps.end(), [&](int a, int b) { return best[a] > best[b]; });
  }

  std::vector<int> free_beams(static_cast<std::size_t>(graph.num_sats), beam_cap);
  std::vector<std::optional<int>> sat_for_hap(haps.size());
  for (int h : haps) {
    const LinkEdge* pick = nullptr;
    for (std::size_t e = offsets[h]; e < offsets[h + 1]; ++e) {
      const auto& edge = graph.edges[e];
      if (free_beams[edge.sat] > 0 && (!pick || edge.weight > pick->weight)) pick = &edge;
    }
    if (pick) {
      --free_beams[pick->sat];
      sat_for_hap[h] = pick->sat;
    }
  }
  return make_assignment(graph, Scheme::greedy, beam_cap, std::move(sat_for_hap));
}

/// Benchmark baseline: each HAP in ascending id picks uniformly among visible
/// satellites with a free beam.
inline Assignment random_assignment(const VisibilityGraph& graph, int beam_cap,
                                    std::uint64_t seed) {
  if (beam_cap < 1) throw InvalidParameter("beam_cap", "must be >= 1");
  const auto offsets = graph.hap_offsets();
  Rng rng(seed);
  std::vector<int> free_beams(static_cast<std::size_t>(graph.num_sats), beam_cap);
  std::vector<std::optional<int>> sat_for_hap(static_cast<std::size_t>(graph.num_haps));
  std::vector<int> candidates;
  for (int h = 0; h < graph.num_haps; ++h) {
    candidates.clear();
    for (std::size_t e = offsets[h]; e < offsets[h + 1]; ++e)
      if (free_beams[graph.edges[e].sat] > 0) candidates.push_back(graph.edges[e].sat);
    if (candidates.empty()) continue;
    const int s = candidates[rng.below(candidates.size())];
    --free_beams[s];
    sat_for_hap[h] = s;
  }
  return make_assignment(graph, Scheme::random, beam_cap, std::move(sat_for_hap));
}

inline constexpr int kBruteForceMaxHaps = 8;
inline constexpr int kBruteForceMaxSats = 4;

/// Exhaustive enumeration of every feasible assignment. Same optimum and
/// tie-breaking as optimal_assignment; intended only as its oracle.
inline Assignment brute_force_assignment(const VisibilityGraph& graph, int beam_cap) {
  if (beam_cap < 1) throw InvalidParameter("beam_cap", "must be >= 1");
  if (graph.num_haps > kBruteForceMaxHaps || graph.num_sats > kBruteForceMaxSats)
    throw SizeLimitExceeded("brute_force_assignment: instance exceeds " +
                            std::to_string(kBruteForceMaxHaps) + " HAPs x " +
                            std::to_string(kBruteForceMaxSats) + " satellites");
  const auto offsets = graph.hap_offsets();
  std::vector<int> load(static_cast<std::size_t>(graph.num_sats), 0);
  std::vector<std::optional<int>> current(static_cast<std::size_t>(graph.num_haps));
  std::vector<std::optional<int>> best = current;
  ExactWeight best_total = 0;

  // Visits satellites in ascending index and "unassigned" last, i.e. in
  // lexicographic order: the first maximum found is the tie-break winner.
  auto recurse = [&](auto&& self, int h, ExactWeight total) -> void {
    if (h == graph.num_haps) {
      if (total > best_total) {
        best_total = total;
        best = current;
      }
      return;
    }
    for (std::size_t e = offsets[h]; e < offsets[h + 1]; ++e) {
      const auto& edge = graph.edges[e];
      if (load[edge.sat] >= beam_cap) continue;
      ++load[edge.sat];
      current[h] = edge.sat;
      self(self, h + 1, total + to_exact(edge.weight));
      current[h].reset();
      --load[edge.sat];
    }
    self(self, h + 1, total);
  };
  recurse(recurse, 0, 0);
  return make_assignment(graph, Scheme::oracle, beam_cap, std::move(best));
}

/// Mean link weight over all HAPs; unassigned HAPs count as 0.
inline double average_strength(const Assignment& assignment, int num_haps) {
  if (num_haps < 1) throw InvalidParameter("num_haps", "must be >= 1");
  return assignment.total_weight / num_haps;
}

/// Graph over precomputed HAP sites; positions are evaluated at time t.
inline VisibilityGraph build_visibility_graph(const ScenarioConfig& scenario,
                                              std::span<const HapSite> sites, double t) {
  const auto& c = scenario.constellation;
  std::vector<EcefPosition> sats;
  sats.reserve(static_cast<std::size_t>(c.num_satellites));
  for (int s = 0; s < c.num_satellites; ++s)
    sats.push_back(satellite_position(scenario.earth, c, s, t, scenario.earth_rotation));

  std::vector<LinkEdge> edges;
  for (const auto& site : sites) {
    const EcefPosition hap = hap_position(scenario.earth, site);
    const double reference = zenith_range_km(c, site.altitude_km);
    for (int s = 0; s < c.num_satellites; ++s) {
      if (!is_visible(elevation_angle(hap, sats[s]), scenario.min_elevation_deg)) continue;
      const double w = std::min(1.0, signal_strength(hap, sats[s], reference));
      edges.push_back({s, site.id, w});
    }
  }
  return VisibilityGraph::make(c.num_satellites, static_cast<int>(sites.size()),
                               std::move(edges), t);
}

inline VisibilityGraph build_visibility_graph(const ScenarioConfig& scenario, double t) {
  scenario.validate();
  if (!(t >= 0)) throw InvalidParameter("t", "must be >= 0");
  const auto sites = hap_sites(scenario);
  return build_visibility_graph(scenario, sites, t);
}

}  // namespace sagsim
