#pragma once

// Line-oriented `key = value` configuration. Keys are dotted (earth.*,
// constellation.*, contacts.*, sweep.*, validate.*); a `[section]` line
// prefixes the keys that follow it. `#` and `;` start comments. Overrides
// (`--set key=value`) use the same keys and are applied after the file.
//
// Key reference:
//   earth.radius_km               double   6371
//   earth.mu_km3_s2               double   398600.4418
//   earth.sidereal_rate_rad_s     double   7.2921159e-5
//   constellation.num_satellites  int      6
//   constellation.altitude_km     double   1414
//   constellation.inclination_deg double   0 (only 0 supported)
//   constellation.initial_phase_deg double 0
//   num_haps                      int      50
//   hap_altitude_km               double   20
//   hap_lat_band_deg              double   20
//   min_elevation_deg             double   10
//   beam_cap                      int      3
//   duration_s                    double   one relative orbital period
//   timestep_s                    double   60
//   placement_seed                uint64   1
//   scheme_seeds                  uint64 list  1
//   earth_rotation                bool     true
//   schemes                       list of optimal|greedy|random|oracle
//   greedy_order                  by_index | best_weight_first
//   workers                       int      1 (0 = all cores)
//   contacts.coarse_step_s        double   60
//   contacts.refine_tol_s         double   0.1
//   contacts.horizon_s            double   one relative orbital period
//   sweep.param                   beam_cap | num_haps
//   sweep.values                  range expression, see parse_range
//   sweep.replications            int      20
//   validate.instances            int      1000
//   validate.seed                 uint64   1

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sagsim/errors.hpp"
#include "sagsim/io.hpp"
#include "sagsim/scenario.hpp"

namespace sagsim {

struct SweepSettings {
  std::string param = "beam_cap";
  std::vector<int> values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int replications = 20;
};

struct ValidateSettings {
  int instances = 1000;
  std::uint64_t seed = 1;
};

struct Settings {
  ScenarioConfig scenario;
  SweepSettings sweep;
  ValidateSettings validate;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  for (;;) {
    const auto pos = s.find(sep);
    parts.push_back(trim(s.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    s.remove_prefix(pos + 1);
  }
  return parts;
}

template <class T>
T parse_number(std::string_view key, std::string_view text, const char* expected) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end)
    throw ConfigError(std::string(key), std::string("expected ") + expected + ", got '" +
                                            std::string(text) + "'");
  return value;
}

inline double parse_double(std::string_view key, std::string_view v) {
  return parse_number<double>(key, v, "a number");
}
inline int parse_int(std::string_view key, std::string_view v) {
  return parse_number<int>(key, v, "an integer");
}
inline std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  return parse_number<std::uint64_t>(key, v, "a non-negative integer");
}
inline bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(std::string(key), "expected a boolean, got '" + std::string(v) + "'");
}

using Setter = std::function<void(Settings&, std::string_view key, std::string_view value)>;

}  // namespace detail

/// Integer list from `a:b` (inclusive), `a:b:step`, or `v1,v2,...`.
inline std::vector<int> parse_range(std::string_view key, std::string_view expr) {
  expr = detail::trim(expr);
  std::vector<int> values;
  if (expr.find(':') != std::string_view::npos) {
    const auto parts = detail::split(expr, ':');
    if (parts.size() > 3) throw ConfigError(std::string(key), "range must be a:b or a:b:step");
    const int lo = detail::parse_int(key, parts[0]);
    const int hi = detail::parse_int(key, parts[1]);
    const int step = parts.size() == 3 ? detail::parse_int(key, parts[2]) : 1;
    if (step < 1) throw ConfigError(std::string(key), "range step must be >= 1");
    if (hi < lo) throw ConfigError(std::string(key), "range end is below its start");
    for (long v = lo; v <= hi; v += step) values.push_back(static_cast<int>(v));
  } else {
    for (auto part : detail::split(expr, ',')) values.push_back(detail::parse_int(key, part));
  }
  if (values.empty()) throw ConfigError(std::string(key), "empty value list");
  return values;
}

inline const std::map<std::string, detail::Setter, std::less<>>& config_keys() {
  using namespace detail;
  using S = Settings&;
  using V = std::string_view;
  static const std::map<std::string, Setter, std::less<>> keys = {
      {"earth.radius_km", [](S s, V k, V v) { s.scenario.earth.radius_km = parse_double(k, v); }},
      {"earth.mu_km3_s2", [](S s, V k, V v) { s.scenario.earth.mu_km3_s2 = parse_double(k, v); }},
      {"earth.sidereal_rate_rad_s",
       [](S s, V k, V v) { s.scenario.earth.sidereal_rate_rad_s = parse_double(k, v); }},
      {"constellation.num_satellites",
       [](S s, V k, V v) { s.scenario.constellation.num_satellites = parse_int(k, v); }},
      {"constellation.altitude_km",
       [](S s, V k, V v) { s.scenario.constellation.altitude_km = parse_double(k, v); }},
      {"constellation.inclination_deg",
       [](S s, V k, V v) { s.scenario.constellation.inclination_deg = parse_double(k, v); }},
      {"constellation.initial_phase_deg",
       [](S s, V k, V v) { s.scenario.constellation.initial_phase_deg = parse_double(k, v); }},
      {"num_haps", [](S s, V k, V v) { s.scenario.num_haps = parse_int(k, v); }},
      {"hap_altitude_km", [](S s, V k, V v) { s.scenario.hap_altitude_km = parse_double(k, v); }},
      {"hap_lat_band_deg", [](S s, V k, V v) { s.scenario.hap_lat_band_deg = parse_double(k, v); }},
      {"min_elevation_deg",
       [](S s, V k, V v) { s.scenario.min_elevation_deg = parse_double(k, v); }},
      {"beam_cap", [](S s, V k, V v) { s.scenario.beam_cap = parse_int(k, v); }},
      {"duration_s", [](S s, V k, V v) { s.scenario.duration_s = parse_double(k, v); }},
      {"timestep_s", [](S s, V k, V v) { s.scenario.timestep_s = parse_double(k, v); }},
      {"placement_seed", [](S s, V k, V v) { s.scenario.placement_seed = parse_u64(k, v); }},
      {"scheme_seeds",
       [](S s, V k, V v) {
         s.scenario.scheme_seeds.clear();
         for (auto part : split(v, ',')) s.scenario.scheme_seeds.push_back(parse_u64(k, part));
       }},
      {"earth_rotation", [](S s, V k, V v) { s.scenario.earth_rotation = parse_bool(k, v); }},
      {"schemes",
       [](S s, V k, V v) {
         s.scenario.schemes.clear();
         for (auto part : split(v, ',')) {
           auto scheme = parse_scheme(part);
           if (!scheme)
             throw ConfigError(std::string(k), "unknown scheme '" + std::string(part) +
                                                   "' (expected optimal, greedy, random, oracle)");
           s.scenario.schemes.push_back(*scheme);
         }
       }},
      {"greedy_order",
       [](S s, V k, V v) {
         if (v == "by_index") s.scenario.greedy_order = GreedyOrder::by_index;
         else if (v == "best_weight_first") s.scenario.greedy_order = GreedyOrder::best_weight_first;
         else throw ConfigError(std::string(k), "expected by_index or best_weight_first");
       }},
      {"workers", [](S s, V k, V v) { s.scenario.workers = parse_int(k, v); }},
      {"contacts.coarse_step_s",
       [](S s, V k, V v) { s.scenario.contacts.coarse_step_s = parse_double(k, v); }},
      {"contacts.refine_tol_s",
       [](S s, V k, V v) { s.scenario.contacts.refine_tol_s = parse_double(k, v); }},
      {"contacts.horizon_s",
       [](S s, V k, V v) { s.scenario.contacts.horizon_s = parse_double(k, v); }},
      {"sweep.param", [](S s, V, V v) { s.sweep.param = std::string(v); }},
      {"sweep.values", [](S s, V k, V v) { s.sweep.values = parse_range(k, v); }},
      {"sweep.replications", [](S s, V k, V v) { s.sweep.replications = parse_int(k, v); }},
      {"validate.instances", [](S s, V k, V v) { s.validate.instances = parse_int(k, v); }},
      {"validate.seed", [](S s, V k, V v) { s.validate.seed = parse_u64(k, v); }},
  };
  return keys;
}

inline void apply_setting(Settings& settings, std::string_view key, std::string_view value) {
  const auto& keys = config_keys();
  auto it = keys.find(key);
  if (it == keys.end()) throw ConfigError(std::string(key), "unknown configuration key");
  it->second(settings, key, value);
}

/// Applies `key = value` lines from `text` onto `settings`.
inline void apply_config_text(Settings& settings, std::string_view text) {
  std::string section;
  int line_no = 0;
  for (auto line : detail::split(text, '\n')) {
    ++line_no;
    if (auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
      line = detail::trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("", "line " + std::to_string(line_no) + ": malformed section header");
      section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected key = value");
    std::string key(detail::trim(line.substr(0, eq)));
    if (!section.empty()) key = section + "." + key;
    apply_setting(settings, key, detail::trim(line.substr(eq + 1)));
  }
}

/// Validates the scenario and sweep settings, reporting the failing key.
inline void validate_settings(const Settings& settings) {
  try {
    settings.scenario.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.field(), e.constraint());
  }
  if (settings.sweep.replications < 1)
    throw ConfigError("sweep.replications", "must be >= 1");
  if (settings.validate.instances < 0) throw ConfigError("validate.instances", "must be >= 0");
}

/// Settings from an optional file plus `key=value` overrides, applied in
/// that order, then validated.
inline Settings parse_settings(const std::filesystem::path& path,
                               const std::vector<std::string>& overrides) {
  Settings settings;
  if (!path.empty()) apply_config_text(settings, read_file(path));
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos)
      throw ConfigError(o, "override must have the form key=value");
    apply_setting(settings, detail::trim(std::string_view(o).substr(0, eq)),
                  detail::trim(std::string_view(o).substr(eq + 1)));
  }
  validate_settings(settings);
  return settings;
}

inline ScenarioConfig parse_config(const std::filesystem::path& path,
                                   const std::vector<std::string>& overrides) {
  return parse_settings(path, overrides).scenario;
}

}  // namespace sagsim
