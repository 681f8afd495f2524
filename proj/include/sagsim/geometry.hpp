#pragma once

// Circular equatorial orbits, HAP placement and the line-of-sight quantities
// derived from them. Units: km, seconds, degrees. Angles are converted to
// radians only inside the functions below.

#include <cmath>
#include <numbers>

#include "sagsim/errors.hpp"

namespace sagsim {

inline constexpr double kPi = std::numbers::pi;

constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

struct EarthModel {
  double radius_km = 6371.0;
  double mu_km3_s2 = 398600.4418;
  double sidereal_rate_rad_s = 7.2921159e-5;

  void validate() const {
    if (!(radius_km > 0)) throw InvalidParameter("earth.radius_km", "must be > 0");
    if (!(mu_km3_s2 > 0)) throw InvalidParameter("earth.mu_km3_s2", "must be > 0");
    if (!(sidereal_rate_rad_s >= 0))
      throw InvalidParameter("earth.sidereal_rate_rad_s", "must be >= 0");
  }
};

/// One orbital plane of evenly phased satellites.
struct ConstellationSpec {
  int num_satellites = 6;
  double altitude_km = 1414.0;
  double inclination_deg = 0.0;
  double initial_phase_deg = 0.0;

  void validate() const {
    if (num_satellites < 1)
      throw InvalidParameter("constellation.num_satellites", "must be >= 1");
    if (!(altitude_km > 0)) throw InvalidParameter("constellation.altitude_km", "must be > 0");
    if (inclination_deg != 0.0)
      throw InvalidParameter("constellation.inclination_deg",
                             "must be 0 (only a single equatorial plane is modeled)");
    if (!std::isfinite(initial_phase_deg))
      throw InvalidParameter("constellation.initial_phase_deg", "must be finite");
  }
};

struct HapSite {
  int id = 0;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double altitude_km = 20.0;

  void validate() const {
    if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0))
      throw InvalidParameter("hap.latitude_deg", "must be in [-90, 90]");
    if (!(longitude_deg >= 0.0 && longitude_deg < 360.0))
      throw InvalidParameter("hap.longitude_deg", "must be in [0, 360)");
    if (!(altitude_km > 0)) throw InvalidParameter("hap.altitude_km", "must be > 0");
  }
};

/// Earth-centered, Earth-fixed position in km.
struct EcefPosition {
  double x_km = 0.0;
  double y_km = 0.0;
  double z_km = 0.0;

  [[nodiscard]] double norm() const noexcept { return std::sqrt(dot(*this)); }
  [[nodiscard]] double dot(const EcefPosition& o) const noexcept {
    return x_km * o.x_km + y_km * o.y_km + z_km * o.z_km;
  }
  [[nodiscard]] EcefPosition cross(const EcefPosition& o) const noexcept {
    return {y_km * o.z_km - z_km * o.y_km, z_km * o.x_km - x_km * o.z_km,
            x_km * o.y_km - y_km * o.x_km};
  }

  friend EcefPosition operator+(const EcefPosition& a, const EcefPosition& b) noexcept {
    return {a.x_km + b.x_km, a.y_km + b.y_km, a.z_km + b.z_km};
  }
  friend EcefPosition operator-(const EcefPosition& a, const EcefPosition& b) noexcept {
    return {a.x_km - b.x_km, a.y_km - b.y_km, a.z_km - b.z_km};
  }
  friend EcefPosition operator*(double s, const EcefPosition& a) noexcept {
    return {s * a.x_km, s * a.y_km, s * a.z_km};
  }
  friend bool operator==(const EcefPosition&, const EcefPosition&) = default;
};

/// Inertial period of a circular orbit, 2*pi*sqrt(a^3/mu).
inline double orbital_period(const EarthModel& earth, double altitude_km) {
  if (!(altitude_km > 0)) throw InvalidParameter("altitude_km", "must be > 0");
  const double a = earth.radius_km + altitude_km;
  return 2.0 * kPi * std::sqrt(a * a * a / earth.mu_km3_s2);
}

/// Angular rate of the satellite's longitude in the Earth-fixed frame.
inline double effective_rate_rad_s(const EarthModel& earth, double altitude_km,
                                   bool earth_rotation) {
  const double orbit_rate = 2.0 * kPi / orbital_period(earth, altitude_km);
  return earth_rotation ? orbit_rate - earth.sidereal_rate_rad_s : orbit_rate;
}

/// Period after which the ground track repeats. Equals orbital_period when
/// earth_rotation is off.
inline double relative_period(const EarthModel& earth, double altitude_km, bool earth_rotation) {
  const double rate = effective_rate_rad_s(earth, altitude_km, earth_rotation);
  if (!(rate > 0))
    throw InvalidParameter("constellation.altitude_km",
                           "orbit is not prograde relative to the rotating Earth");
  return 2.0 * kPi / rate;
}

/// Longitude of satellite `sat_index` at time t, in degrees (not wrapped).
inline double satellite_longitude_deg(const EarthModel& earth, const ConstellationSpec& spec,
                                      int sat_index, double t, bool earth_rotation) {
  if (sat_index < 0 || sat_index >= spec.num_satellites)
    throw InvalidParameter("sat_index", "must be in [0, num_satellites)");
  if (!(t >= 0)) throw InvalidParameter("t", "must be >= 0");
  const double spacing = 360.0 / spec.num_satellites;
  const double rate = effective_rate_rad_s(earth, spec.altitude_km, earth_rotation);
  return spec.initial_phase_deg + sat_index * spacing + rad_to_deg(rate * t);
}

inline EcefPosition satellite_position(const EarthModel& earth, const ConstellationSpec& spec,
                                       int sat_index, double t, bool earth_rotation) {
  const double lon = deg_to_rad(satellite_longitude_deg(earth, spec, sat_index, t, earth_rotation));
  const double r = earth.radius_km + spec.altitude_km;
  return {r * std::cos(lon), r * std::sin(lon), 0.0};
}

inline EcefPosition hap_position(const EarthModel& earth, const HapSite& site) {
  const double lat = deg_to_rad(site.latitude_deg);
  const double lon = deg_to_rad(site.longitude_deg);
  const double r = earth.radius_km + site.altitude_km;
  return {r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon),
          r * std::sin(lat)};
}

/// Elevation of `target` above the local horizontal plane of `observer`, in
/// degrees, with the horizontal plane normal to the geocentric radius.
inline double elevation_angle(const EcefPosition& observer, const EcefPosition& target) {
  const double r = observer.norm();
  if (!(r > 0)) throw DegenerateGeometry("observer at the Earth's center");
  const EcefPosition d = target - observer;
  if (d.norm() == 0.0) throw DegenerateGeometry("observer and target coincide");
  const EcefPosition up = (1.0 / r) * observer;
  // atan2 keeps full precision near zenith where asin(u.d/|d|) does not.
  return rad_to_deg(std::atan2(up.dot(d), up.cross(d).norm()));
}

inline double slant_range(const EcefPosition& observer, const EcefPosition& target) {
  return (target - observer).norm();
}

/// Zenith-normalized inverse-square weight, (reference / slant)^2.
inline double signal_strength(const EcefPosition& observer, const EcefPosition& satellite,
                              double reference_range_km) {
  if (!(reference_range_km > 0)) throw InvalidParameter("reference_range_km", "must be > 0");
  const double ratio = reference_range_km / slant_range(observer, satellite);
  return ratio * ratio;
}

/// Slant range at zenith between the HAP shell and the satellite shell.
inline double zenith_range_km(const ConstellationSpec& spec, double hap_altitude_km) {
  return spec.altitude_km - hap_altitude_km;
}

inline bool is_visible(double elevation_deg, double min_elevation_deg) noexcept {
  return elevation_deg >= min_elevation_deg;
}

/// Largest Earth-central angle between observer and sub-satellite point at
/// which the satellite is still at `min_elevation_deg`, in degrees.
inline double max_visibility_central_angle_deg(const EarthModel& earth, double sat_altitude_km,
                                               double observer_altitude_km,
                                               double min_elevation_deg) {
  const double ro = earth.radius_km + observer_altitude_km;
  const double rs = earth.radius_km + sat_altitude_km;
  if (!(rs > ro)) throw InvalidParameter("altitude_km", "satellite must be above observer");
  const double el = deg_to_rad(min_elevation_deg);
  return rad_to_deg(kPi / 2.0 - el - std::asin(ro * std::cos(el) / rs));
}

}  // namespace sagsim
