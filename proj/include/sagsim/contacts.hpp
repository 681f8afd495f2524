#pragma once

// Time-evolving resource graph: for every satellite-HAP pair, the maximal
// intervals during which the link is available, plus time-indexed snapshots
// that agree with the direct geometry.

#include <algorithm>
#include <optional>
#include <iterator>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sagsim/errors.hpp"
#include "sagsim/geometry.hpp"
#include "sagsim/io.hpp"
#include "sagsim/matching.hpp"
#include "sagsim/scenario.hpp"

namespace sagsim {

struct ContactWindow {
  int sat_index = 0;
  int hap_id = 0;
  double start_s = 0.0;
  double end_s = 0.0;

  [[nodiscard]] bool contains(double t) const noexcept { return start_s <= t && t <= end_s; }
  [[nodiscard]] double duration_s() const noexcept { return end_s - start_s; }

  friend bool operator==(const ContactWindow&, const ContactWindow&) = default;
};

struct NetworkElement {
  enum class Kind { satellite, hap };
  Kind kind = Kind::satellite;
  int index = 0;

  friend bool operator==(const NetworkElement&, const NetworkElement&) = default;
};

/// One sampled (t, signal strength) series per window, parallel to
/// Terg::windows().
using WeightProfile = std::vector<std::vector<std::pair<double, double>>>;

class Terg {
 public:
  Terg(int num_sats, int num_haps, double horizon_s, std::vector<ContactWindow> windows,
       WeightProfile weight_profile = {})
      : num_sats_(num_sats),
        num_haps_(num_haps),
        horizon_s_(horizon_s),
        windows_(std::move(windows)),
        weight_profile_(std::move(weight_profile)) {
    for (int s = 0; s < num_sats; ++s) elements_.push_back({NetworkElement::Kind::satellite, s});
    for (int h = 0; h < num_haps; ++h) elements_.push_back({NetworkElement::Kind::hap, h});
    // Pair order (sat, hap), then start time.
    std::vector<std::size_t> order(windows_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
      const auto& x = windows_[a];
      const auto& y = windows_[b];
      return std::tuple(x.sat_index, x.hap_id, x.start_s) <
             std::tuple(y.sat_index, y.hap_id, y.start_s);
    });
    std::vector<ContactWindow> sorted;
    WeightProfile profile;
    for (std::size_t i : order) {
      sorted.push_back(windows_[i]);
      if (!weight_profile_.empty()) profile.push_back(std::move(weight_profile_[i]));
    }
    windows_ = std::move(sorted);
    weight_profile_ = std::move(profile);

    pair_offsets_.assign(static_cast<std::size_t>(num_sats) * num_haps + 1, 0);
    for (const auto& w : windows_) ++pair_offsets_[pair_index(w.sat_index, w.hap_id) + 1];
    for (std::size_t i = 1; i < pair_offsets_.size(); ++i)
      pair_offsets_[i] += pair_offsets_[i - 1];
  }

  [[nodiscard]] int num_sats() const noexcept { return num_sats_; }
  [[nodiscard]] int num_haps() const noexcept { return num_haps_; }
  [[nodiscard]] double horizon_s() const noexcept { return horizon_s_; }
  [[nodiscard]] const std::vector<NetworkElement>& elements() const noexcept { return elements_; }
  [[nodiscard]] const std::vector<ContactWindow>& windows() const noexcept { return windows_; }
  [[nodiscard]] const WeightProfile& weight_profile() const noexcept { return weight_profile_; }

  [[nodiscard]] std::span<const ContactWindow> windows_for(int sat, int hap) const {
    const std::size_t p = pair_index(sat, hap);
    return std::span(windows_).subspan(pair_offsets_[p], pair_offsets_[p + 1] - pair_offsets_[p]);
  }

  [[nodiscard]] bool available(int sat, int hap, double t) const {
    auto ws = windows_for(sat, hap);
    auto it = std::upper_bound(ws.begin(), ws.end(), t, [](double v, const ContactWindow& w) {
      return v < w.start_s;
    });
    return it != ws.begin() && std::prev(it)->contains(t);
  }

 private:
  [[nodiscard]] std::size_t pair_index(int sat, int hap) const {
    if (sat < 0 || sat >= num_sats_ || hap < 0 || hap >= num_haps_)
      throw InvalidParameter("pair", "satellite or HAP index out of range");
    return static_cast<std::size_t>(sat) * num_haps_ + hap;
  }

  int num_sats_;
  int num_haps_;
  double horizon_s_;
  std::vector<NetworkElement> elements_;
  std::vector<ContactWindow> windows_;
  WeightProfile weight_profile_;
  std::vector<std::size_t> pair_offsets_;
};

namespace detail {

inline std::vector<ContactWindow> pair_windows(const ScenarioConfig& scenario, int sat,
                                               const HapSite& site, double horizon_s,
                                               double coarse_step_s, double refine_tol_s) {
  std::vector<ContactWindow> out;
  if (!(horizon_s > 0)) return out;
  const EcefPosition hap = hap_position(scenario.earth, site);
  auto visible = [&](double t) {
    const EcefPosition s = satellite_position(scenario.earth, scenario.constellation, sat, t,
                                              scenario.earth_rotation);
    return is_visible(elevation_angle(hap, s), scenario.min_elevation_deg);
  };
  // Narrows [lo, hi] around the state change; `lo` keeps the state of lo.
  auto bisect = [&](double lo, double hi, bool lo_state) {
    while (hi - lo > refine_tol_s) {
      const double mid = 0.5 * (lo + hi);
      (visible(mid) == lo_state ? lo : hi) = mid;
    }
    return std::pair(lo, hi);
  };
  auto emit = [&](double start, double end) {
    if (end > start) out.push_back({sat, site.id, start, end});
  };

  double prev_t = 0.0;
  bool prev = visible(0.0);
  bool open = prev;
  double open_start = 0.0;
  for (long k = 1;; ++k) {
    const double t = std::min(static_cast<double>(k) * coarse_step_s, horizon_s);
    const bool now = visible(t);
    if (now != prev) {
      auto [lo, hi] = bisect(prev_t, t, prev);
      if (now) {
        open = true;
        open_start = hi;
      } else {
        emit(open_start, lo);
        open = false;
      }
    }
    prev_t = t;
    prev = now;
    if (t >= horizon_s) break;
  }
  if (open) emit(open_start, horizon_s);
  return out;
}

}  // namespace detail

/// Maximal visibility intervals of one satellite-HAP pair within
/// [0, horizon_s]. Passes are detected on a coarse grid and their boundaries
/// refined by bisection to within refine_tol_s; passes shorter than the
/// coarse step can be missed.
inline std::vector<ContactWindow> contact_windows(const ScenarioConfig& scenario, int sat_index,
                                                  int hap_id, double horizon_s,
                                                  double coarse_step_s, double refine_tol_s) {
  scenario.validate();
  if (sat_index < 0 || sat_index >= scenario.constellation.num_satellites)
    throw InvalidParameter("sat_index", "must be in [0, num_satellites)");
  if (hap_id < 0 || hap_id >= scenario.num_haps)
    throw InvalidParameter("hap_id", "must be in [0, num_haps)");
  if (!(coarse_step_s > 0)) throw InvalidParameter("coarse_step_s", "must be > 0");
  if (!(refine_tol_s > 0)) throw InvalidParameter("refine_tol_s", "must be > 0");
  if (!(horizon_s >= 0)) throw InvalidParameter("horizon_s", "must be >= 0");
  const auto sites = hap_sites(scenario);
  return detail::pair_windows(scenario, sat_index, sites[hap_id], horizon_s, coarse_step_s,
                              refine_tol_s);
}

/// Union of contact windows over all pairs. With profile_step_s set, each
/// window also carries signal strength sampled every profile_step_s from its
/// start, plus its end point.
inline Terg build_terg(const ScenarioConfig& scenario, double horizon_s,
                       std::optional<double> profile_step_s = std::nullopt) {
  scenario.validate();
  if (!(horizon_s >= 0)) throw InvalidParameter("horizon_s", "must be >= 0");
  if (profile_step_s && !(*profile_step_s > 0))
    throw InvalidParameter("profile_step_s", "must be > 0");
  const auto sites = hap_sites(scenario);
  const int num_sats = scenario.constellation.num_satellites;
  std::vector<ContactWindow> windows;
  for (int s = 0; s < num_sats; ++s)
    for (const auto& site : sites)
      for (auto& w : detail::pair_windows(scenario, s, site, horizon_s,
                                          scenario.contacts.coarse_step_s,
                                          scenario.contacts.refine_tol_s))
        windows.push_back(w);

  WeightProfile profile;
  if (profile_step_s) {
    for (const auto& w : windows) {
      const auto& site = sites[w.hap_id];
      const EcefPosition hap = hap_position(scenario.earth, site);
      const double reference = zenith_range_km(scenario.constellation, site.altitude_km);
      auto& series = profile.emplace_back();
      auto sample = [&](double t) {
        const EcefPosition sat = satellite_position(scenario.earth, scenario.constellation,
                                                    w.sat_index, t, scenario.earth_rotation);
        series.emplace_back(t, std::min(1.0, signal_strength(hap, sat, reference)));
      };
      for (long k = 0; w.start_s + k * *profile_step_s < w.end_s; ++k)
        sample(w.start_s + k * *profile_step_s);
      sample(w.end_s);
    }
  }
  return {num_sats, static_cast<int>(sites.size()), horizon_s, std::move(windows),
          std::move(profile)};
}

/// Visibility graph at time t with edges taken from the TERG and weights
/// recomputed from geometry.
inline VisibilityGraph terg_snapshot(const Terg& terg, const ScenarioConfig& scenario, double t) {
  if (!(t >= 0 && t <= terg.horizon_s()))
    throw InvalidParameter("t", "must be within [0, horizon]");
  const auto sites = hap_sites(scenario);
  if (static_cast<int>(sites.size()) != terg.num_haps() ||
      scenario.constellation.num_satellites != terg.num_sats())
    throw InvalidParameter("scenario", "does not match the TERG's elements");
  std::vector<LinkEdge> edges;
  for (const auto& site : sites) {
    const EcefPosition hap = hap_position(scenario.earth, site);
    const double reference = zenith_range_km(scenario.constellation, site.altitude_km);
    for (int s = 0; s < terg.num_sats(); ++s) {
      if (!terg.available(s, site.id, t)) continue;
      const EcefPosition sat = satellite_position(scenario.earth, scenario.constellation, s, t,
                                                  scenario.earth_rotation);
      edges.push_back({s, site.id, std::min(1.0, signal_strength(hap, sat, reference))});
    }
  }
  return VisibilityGraph::make(terg.num_sats(), terg.num_haps(), std::move(edges), t);
}

inline std::string contact_plan_csv(const Terg& terg) {
  std::string out = "sat_index,hap_id,start_s,end_s\n";
  for (const auto& w : terg.windows()) {
    out += std::to_string(w.sat_index) + ',' + std::to_string(w.hap_id) + ',' +
           format_double(w.start_s) + ',' + format_double(w.end_s) + '\n';
  }
  return out;
}

inline nlohmann::json contact_plan_json(const Terg& terg) {
  using nlohmann::json;
  json elements = json::array();
  for (const auto& e : terg.elements())
    elements.push_back(
        {{"kind", e.kind == NetworkElement::Kind::satellite ? "satellite" : "hap"},
         {"index", e.index}});
  json windows = json::array();
  for (std::size_t i = 0; i < terg.windows().size(); ++i) {
    const auto& w = terg.windows()[i];
    json record = {{"sat_index", w.sat_index},
                   {"hap_id", w.hap_id},
                   {"start_s", w.start_s},
                   {"end_s", w.end_s}};
    if (!terg.weight_profile().empty()) {
      json series = json::array();
      for (const auto& [t, weight] : terg.weight_profile()[i]) series.push_back({t, weight});
      record["weight_profile"] = std::move(series);
    }
    windows.push_back(std::move(record));
  }
  return {{"horizon_s", terg.horizon_s()}, {"elements", std::move(elements)},
          {"windows", std::move(windows)}};
}

}  // namespace sagsim
