#pragma once

#include <cmath>

// Unit conversions are centralized here so that dB/linear and dBm/W mistakes
// cannot be introduced piecemeal across modules.
namespace arisim::units {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double dbm_to_watt(double dbm) {
  return std::pow(10.0, (dbm - 30.0) / 10.0);
}

inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

inline double dbw_to_watt(double dbw) { return std::pow(10.0, dbw / 10.0); }

inline double wavelength_m(double carrier_hz) {
  return kSpeedOfLight / carrier_hz;
}

}  // namespace arisim::units
