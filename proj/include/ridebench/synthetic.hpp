#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ridebench/panel.hpp"

namespace ridebench {

// Planted regime shift: every station is scaled by level_multiplier during
// [start_day, start_day + duration_days), and the listed stations emit
// exactly zero. duration_days < 0 means open-ended.
struct SyntheticShock {
  int start_day = 0;
  int duration_days = -1;
  double level_multiplier = 1.0;
  std::vector<int> closed_stations;

  bool active(int day) const {
    if (day < start_day) return false;
    return duration_days < 0 || day < start_day + duration_days;
  }
};

// Desk-scale stand-in for a real ridership panel: per-station base level,
// weekly profile, yearly cycle, multiplicative lognormal noise, and planted
// shocks.
struct SyntheticScenario {
  int n_stations = 20;
  int n_days = 1461;
  Date start_date = Date::from_ymd(2017, 1, 2);
  std::vector<double> base_levels;      // broadcast if a single entry
  std::vector<double> weekly_profile;   // 7 multipliers, Monday-first
  double yearly_amplitude = 0.0;
  double noise_sigma = 0.0;             // lognormal sigma, mean-one noise
  std::vector<SyntheticShock> shocks;

  void validate() const;  // throws ConfigError
  double base_level(int station) const {
    return base_levels.size() == 1 ? base_levels[0]
                                   : base_levels[static_cast<std::size_t>(station)];
  }
};

// count[s][d] = round(base * weekly[dow] * (1 + amp * sin(2*pi*doy/365.25))
//               * shock_multiplier * noise), floored at 0. Closed stations
// emit exactly 0 for the closure. Bit-reproducible for a fixed seed.
RidershipPanel generate_synthetic(const SyntheticScenario& scenario,
                                  std::uint64_t seed,
                                  const CalendarSpec& calendar);

}  // namespace ridebench
