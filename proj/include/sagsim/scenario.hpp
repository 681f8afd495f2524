#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sagsim/errors.hpp"
#include "sagsim/geometry.hpp"
#include "sagsim/rng.hpp"

namespace sagsim {

enum class Scheme { optimal, greedy, random, oracle };

inline std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::optimal: return "optimal";
    case Scheme::greedy: return "greedy";
    case Scheme::random: return "random";
    case Scheme::oracle: return "oracle";
  }
  return "?";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) noexcept {
  for (Scheme s : {Scheme::optimal, Scheme::greedy, Scheme::random, Scheme::oracle})
    if (to_string(s) == name) return s;
  return std::nullopt;
}

/// HAP processing order of the greedy scheme.
enum class GreedyOrder {
  by_index,           // ascending hap_id
  best_weight_first,  // descending best visible weight, ties by hap_id
};

struct ContactSettings {
  double coarse_step_s = 60.0;
  double refine_tol_s = 0.1;
  std::optional<double> horizon_s;  // default: one relative period
};

/// Everything needed to reproduce a seeded run.
struct ScenarioConfig {
  EarthModel earth;
  ConstellationSpec constellation;
  int num_haps = 50;
  double hap_altitude_km = 20.0;
  double hap_lat_band_deg = 20.0;
  double min_elevation_deg = 10.0;
  int beam_cap = 3;
  std::optional<double> duration_s;  // default: one relative period
  double timestep_s = 60.0;
  std::uint64_t placement_seed = 1;
  std::vector<std::uint64_t> scheme_seeds{1};
  bool earth_rotation = true;
  std::vector<Scheme> schemes{Scheme::optimal, Scheme::greedy, Scheme::random};
  GreedyOrder greedy_order = GreedyOrder::by_index;
  ContactSettings contacts;
  // When non-empty, used verbatim instead of sampling from placement_seed;
  // its size must equal num_haps.
  std::vector<HapSite> hap_sites;
  // Worker threads for replications; 0 = hardware concurrency. Never
  // affects numerical output.
  int workers = 1;

  [[nodiscard]] double relative_period_s() const {
    return relative_period(earth, constellation.altitude_km, earth_rotation);
  }
  [[nodiscard]] double effective_duration_s() const {
    return duration_s ? *duration_s : relative_period_s();
  }
  [[nodiscard]] double effective_horizon_s() const {
    return contacts.horizon_s ? *contacts.horizon_s : relative_period_s();
  }

  void validate() const {
    earth.validate();
    constellation.validate();
    if (num_haps < 1) throw InvalidParameter("num_haps", "must be >= 1");
    if (!(hap_altitude_km > 0)) throw InvalidParameter("hap_altitude_km", "must be > 0");
    if (!(hap_altitude_km < constellation.altitude_km))
      throw InvalidParameter("hap_altitude_km", "must be below constellation.altitude_km");
    if (!(hap_lat_band_deg >= 0 && hap_lat_band_deg <= 90))
      throw InvalidParameter("hap_lat_band_deg", "must be in [0, 90]");
    if (!(min_elevation_deg >= -90 && min_elevation_deg <= 90))
      throw InvalidParameter("min_elevation_deg", "must be in [-90, 90]");
    if (beam_cap < 1) throw InvalidParameter("beam_cap", "must be >= 1");
    if (!(timestep_s > 0)) throw InvalidParameter("timestep_s", "must be > 0");
    if (duration_s && !(*duration_s >= timestep_s))
      throw InvalidParameter("duration_s", "must be >= timestep_s");
    if (scheme_seeds.empty()) throw InvalidParameter("scheme_seeds", "must not be empty");
    if (schemes.empty()) throw InvalidParameter("schemes", "must not be empty");
    if (!(contacts.coarse_step_s > 0))
      throw InvalidParameter("contacts.coarse_step_s", "must be > 0");
    if (!(contacts.refine_tol_s > 0))
      throw InvalidParameter("contacts.refine_tol_s", "must be > 0");
    if (contacts.horizon_s && !(*contacts.horizon_s >= 0))
      throw InvalidParameter("contacts.horizon_s", "must be >= 0");
    if (workers < 0) throw InvalidParameter("workers", "must be >= 0");
    if (!hap_sites.empty()) {
      if (static_cast<int>(hap_sites.size()) != num_haps)
        throw InvalidParameter("hap_sites", "count must equal num_haps");
      for (std::size_t i = 0; i < hap_sites.size(); ++i) {
        hap_sites[i].validate();
        if (hap_sites[i].id != static_cast<int>(i))
          throw InvalidParameter("hap_sites", "ids must be 0..num_haps-1 in order");
      }
    }
    (void)relative_period_s();
  }
};

/// HAP sites for a scenario: explicit sites if given, otherwise latitudes
/// uniform in [-band, band] and longitudes uniform in [0, 360) drawn from
/// placement_seed.
inline std::vector<HapSite> hap_sites(const ScenarioConfig& config) {
  if (!config.hap_sites.empty()) return config.hap_sites;
  std::vector<HapSite> sites;
  sites.reserve(static_cast<std::size_t>(config.num_haps));
  Rng rng(config.placement_seed);
  for (int i = 0; i < config.num_haps; ++i) {
    HapSite s;
    s.id = i;
    s.latitude_deg = rng.uniform(-config.hap_lat_band_deg, config.hap_lat_band_deg);
    s.longitude_deg = rng.uniform(0.0, 360.0);
    if (s.longitude_deg >= 360.0) s.longitude_deg = 0.0;
    s.altitude_km = config.hap_altitude_km;
    sites.push_back(s);
  }
  return sites;
}

}  // namespace sagsim
