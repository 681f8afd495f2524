// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Usage: acceptance <path-to-sagsim>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "sagsim/sagsim.hpp"

namespace {

using namespace sagsim;

struct Outcome {
  bool pass = false;
  std::string detail;
};

const SummaryStats& stats_for(const SweepCell& cell, Scheme s) {
  for (const auto& st : cell.stats)
    if (st.scheme == s) return st;
  throw std::logic_error("scheme missing from sweep");
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << v;
  return ss.str();
}

Outcome oracle_equivalence() {
  const auto report = validate_solver(
      [](const VisibilityGraph& g, int cap) { return optimal_assignment(g, cap); }, 1000, 1);
  Outcome o{report.ok(), std::to_string(report.passed) + "/1000 bit-equal and feasible"};
  if (!report.ok()) o.detail += "; first failure: " + report.failures.front().reason;
  return o;
}

Outcome kepler() {
  const double t = orbital_period(EarthModel{}, 1414.0);
  return {std::abs(t - 6836.0) <= 10.0, "period " + fmt(t, 7) + " s"};
}

Outcome closed_form_geometry() {
  Rng rng(2024);
  double worst_el = 0.0;
  double worst_range = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double ro = rng.uniform(6371.0, 6421.0);
    const double rs = ro + rng.uniform(200.0, 3000.0);
    const double gamma = deg_to_rad(rng.uniform(0.01, 60.0));
    // Random observer direction u and a unit w orthogonal to it.
    const double lat = std::asin(rng.uniform(-1.0, 1.0));
    const double lon = rng.uniform(0.0, 2 * std::acos(-1.0));
    const EcefPosition u{std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
    const EcefPosition a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    EcefPosition w = a - a.dot(u) * u;
    w = (1.0 / w.norm()) * w;
    const EcefPosition obs = ro * u;
    const EcefPosition sat = rs * (std::cos(gamma) * u + std::sin(gamma) * w);

    const double rho = ro / rs;
    const double el_ref = rad_to_deg(std::atan((std::cos(gamma) - rho) / std::sin(gamma)));
    const double range_ref = std::sqrt(ro * ro + rs * rs - 2 * ro * rs * std::cos(gamma));
    worst_el = std::max(worst_el, std::abs(elevation_angle(obs, sat) - el_ref));
    worst_range = std::max(worst_range, std::abs(slant_range(obs, sat) - range_ref) / range_ref);
  }
  const double limit = max_visibility_central_angle_deg(EarthModel{}, 1414.0, 20.0, 10.0);
  const bool pass = worst_el <= 1e-6 && worst_range <= 1e-9 && std::abs(limit - 26.0) <= 0.2;
  return {pass, "max |d el| " + fmt(worst_el, 3) + " deg, max rel d range " + fmt(worst_range, 3) +
                    ", limit angle " + fmt(limit, 6) + " deg"};
}

Outcome beam_cap_trend() {
  ScenarioConfig c;
  c.workers = 0;
  std::vector<int> caps{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 50};
  const auto r = sweep_beam_cap(c, caps, 20);
  bool ordering = true;
  bool monotone = true;
  for (std::size_t v = 0; v < r.per_value.size(); ++v) {
    const auto& opt = stats_for(r.per_value[v], Scheme::optimal);
    ordering = ordering && opt.mean >= stats_for(r.per_value[v], Scheme::greedy).mean &&
               opt.mean >= stats_for(r.per_value[v], Scheme::random).mean;
    if (v > 0) {
      const auto& prev = stats_for(r.per_value[v - 1], Scheme::optimal);
      for (std::size_t k = 0; k < opt.samples.size(); ++k)
        monotone = monotone && opt.samples[k] >= prev.samples[k];
    }
  }
  const double at_50 = stats_for(r.per_value.back(), Scheme::optimal).mean;
  int k_converged = 0;
  for (std::size_t v = 0; v + 1 < r.per_value.size() && k_converged == 0; ++v)
    if (stats_for(r.per_value[v], Scheme::optimal).mean >= 0.99 * at_50) k_converged = caps[v];
  std::string detail = std::string("(a) ordering ") + (ordering ? "holds" : "violated") +
                       ", (b) per-replication monotone " + (monotone ? "yes" : "no") +
                       ", (c) cap=50 mean " + fmt(at_50) + ", ";
  detail += k_converged ? "within 1% at K=" + std::to_string(k_converged)
                        : "not within 1% by K=10 (cap 10 mean " +
                              fmt(stats_for(r.per_value[9], Scheme::optimal).mean) + ")";
  for (std::size_t v : {0u, 2u, 9u}) {
    const auto& cell = r.per_value[v];
    detail += "; cap " + std::to_string(cell.value) + ": opt " +
              fmt(stats_for(cell, Scheme::optimal).mean, 4) + " greedy " +
              fmt(stats_for(cell, Scheme::greedy).mean, 4) + " random " +
              fmt(stats_for(cell, Scheme::random).mean, 4);
  }
  return {ordering && monotone && k_converged != 0, detail};
}

Outcome hap_count_trend() {
  ScenarioConfig c;
  c.workers = 0;
  c.beam_cap = 3;
  std::vector<int> counts;
  for (int n = 10; n <= 100; n += 10) counts.push_back(n);
  const auto r = sweep_num_haps(c, counts, 20);
  bool ordering = true;
  for (const auto& cell : r.per_value) {
    const double opt = stats_for(cell, Scheme::optimal).mean;
    ordering = ordering && opt >= stats_for(cell, Scheme::greedy).mean &&
               opt >= stats_for(cell, Scheme::random).mean;
  }
  const auto& few = stats_for(r.per_value.front(), Scheme::optimal);
  const auto& many = stats_for(r.per_value.back(), Scheme::optimal);
  const bool separated = many.ci_high < few.ci_low;
  return {ordering && separated,
          "10 HAPs " + fmt(few.mean, 4) + " [" + fmt(few.ci_low, 4) + ", " + fmt(few.ci_high, 4) +
              "], 100 HAPs " + fmt(many.mean, 4) + " [" + fmt(many.ci_low, 4) + ", " +
              fmt(many.ci_high, 4) + "], ordering " + (ordering ? "holds" : "violated")};
}

Outcome terg_consistency() {
  ScenarioConfig c;
  const double horizon = c.effective_horizon_s();
  const double tol = c.contacts.refine_tol_s;
  const auto terg = build_terg(c, horizon);
  const auto sites = hap_sites(c);

  Rng rng(77);
  int compared = 0;
  int skipped = 0;
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const double t = rng.uniform(0.0, horizon);
    bool near = false;
    for (const auto& w : terg.windows())
      near = near || std::abs(t - w.start_s) <= tol || std::abs(t - w.end_s) <= tol;
    if (near) {
      ++skipped;
      continue;
    }
    ++compared;
    if (!(terg_snapshot(terg, c, t) == build_visibility_graph(c, sites, t))) ++mismatches;
  }

  auto visible = [&](const ContactWindow& w, double t) {
    const auto sat = satellite_position(c.earth, c.constellation, w.sat_index, t, c.earth_rotation);
    return is_visible(elevation_angle(hap_position(c.earth, sites[w.hap_id]), sat),
                      c.min_elevation_deg);
  };
  int boundaries = 0;
  int unbracketed = 0;
  for (const auto& w : terg.windows()) {
    if (w.start_s > 0) {
      ++boundaries;
      if (visible(w, w.start_s - tol) || !visible(w, w.start_s + tol)) ++unbracketed;
    }
    if (w.end_s < horizon) {
      ++boundaries;
      if (!visible(w, w.end_s - tol) || visible(w, w.end_s + tol)) ++unbracketed;
    }
  }
  return {mismatches == 0 && unbracketed == 0 && compared > 0,
          std::to_string(compared) + " snapshots compared (" + std::to_string(skipped) +
              " within tolerance of a boundary), " + std::to_string(mismatches) +
              " mismatches; " + std::to_string(boundaries - unbracketed) + "/" +
              std::to_string(boundaries) + " boundaries bracket the threshold"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& exe) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sagsim_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "sweep.cfg");
    cfg << "scheme_seeds = 3, 4\nworkers = 0\n[sweep]\nparam = beam_cap\nvalues = 1:5\n"
           "replications = 4\n";
  }
  bool ran = true;
  for (const char* name : {"a.csv", "b.csv"}) {
    const std::string cmd = "\"" + exe + "\" sweep --config \"" + (dir / "sweep.cfg").string() +
                            "\" --out \"" + (dir / name).string() + "\"";
    ran = ran && std::system(cmd.c_str()) == 0;
  }
  const std::string a = slurp(dir / "a.csv");
  const bool files_equal = ran && !a.empty() && a == slurp(dir / "b.csv");
  fs::remove_all(dir);

  ScenarioConfig c;
  c.schemes = {Scheme::random};
  c.scheme_seeds = {42};
  const auto g = build_visibility_graph(c, 1234.0);
  bool random_repro = random_assignment(g, 3, 42) == random_assignment(g, 3, 42) &&
                      run_scenario(c) == run_scenario(c);
  return {files_equal && random_repro,
          std::string("sweep files ") + (files_equal ? "byte-identical" : "differ") +
              " (" + std::to_string(a.size()) + " bytes), random scheme " +
              (random_repro ? "reproduces from seed" : "does not reproduce")};
}

Outcome dominance() {
  Rng rng(8);
  int comparisons = 0;
  int violations = 0;
  for (int i = 0; i < 500; ++i) {
    const int sats = 1 + static_cast<int>(rng.below(10));
    const int haps = 1 + static_cast<int>(rng.below(100));
    const double density = rng.uniform();
    std::vector<LinkEdge> edges;
    for (int h = 0; h < haps; ++h)
      for (int s = 0; s < sats; ++s)
        if (rng.uniform() < density) edges.push_back({s, h, rng.uniform_open_closed()});
    const auto g = VisibilityGraph::make(sats, haps, std::move(edges));
    const int cap = 1 + static_cast<int>(rng.below(12));
    const auto opt = optimal_assignment(g, cap);
    for (auto order : {GreedyOrder::by_index, GreedyOrder::best_weight_first}) {
      ++comparisons;
      if (opt.total_weight < greedy_assignment(g, cap, order).total_weight) ++violations;
    }
    for (int k = 0; k < 10; ++k) {
      ++comparisons;
      if (opt.total_weight < random_assignment(g, cap, rng.next()).total_weight) ++violations;
    }
    if (check_assignment(g, opt)) ++violations;
  }
  return {violations == 0,
          std::to_string(comparisons) + " comparisons, " + std::to_string(violations) + " violations"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-sagsim>\n";
    return 2;
  }
  const std::string exe = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"orbital period", kepler},
      {"closed-form geometry", closed_form_geometry},
      {"beam cap trend", beam_cap_trend},
      {"HAP count trend", hap_count_trend},
      {"TERG consistency", terg_consistency},
      {"determinism", [&] { return determinism(exe); }},
      {"dominance", dominance},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s [%zu] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
