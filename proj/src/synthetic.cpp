#include "ridebench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ridebench/errors.hpp"
#include "ridebench/rng.hpp"

namespace ridebench {

void SyntheticScenario::validate() const {
  if (n_stations <= 0) throw ConfigError("synthetic: n_stations must be > 0");
  if (n_days <= 0) throw ConfigError("synthetic: n_days must be > 0");
  if (base_levels.empty()) {
    throw ConfigError("synthetic: base_levels must not be empty");
  }
  if (base_levels.size() != 1 &&
      base_levels.size() != static_cast<std::size_t>(n_stations)) {
    throw ConfigError("synthetic: base_levels must have 1 or n_stations entries");
  }
  if (weekly_profile.size() != 7) {
    throw ConfigError("synthetic: weekly_profile needs exactly 7 multipliers");
  }
  for (double m : weekly_profile) {
    if (m < 0) throw ConfigError("synthetic: weekly multipliers must be >= 0");
  }
  for (double b : base_levels) {
    if (b < 0) throw ConfigError("synthetic: base levels must be >= 0");
  }
  if (noise_sigma < 0) throw ConfigError("synthetic: noise_sigma must be >= 0");
  for (const auto& s : shocks) {
    if (s.level_multiplier < 0) {
      throw ConfigError("synthetic: shock multipliers must be >= 0");
    }
    for (int c : s.closed_stations) {
      if (c < 0 || c >= n_stations) {
        throw ConfigError("synthetic: closed station index out of range");
      }
    }
  }
}

RidershipPanel generate_synthetic(const SyntheticScenario& scenario,
                                  std::uint64_t seed,
                                  const CalendarSpec& calendar) {
  scenario.validate();
  const int S = scenario.n_stations;
  const int D = scenario.n_days;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(S) * D, 0);

  // One draw per (station, day) in a fixed order keeps output identical
  // regardless of how shocks or closures mask individual cells.
  Rng rng(seed);
  const double sig = scenario.noise_sigma;

  for (int s = 0; s < S; ++s) {
    const double base = scenario.base_level(s);
    for (int d = 0; d < D; ++d) {
      const double z = rng.normal();
      const Date date = scenario.start_date + d;
      double mult = 1.0;
      bool closed = false;
      for (const auto& shock : scenario.shocks) {
        if (!shock.active(d)) continue;
        mult *= shock.level_multiplier;
        for (int c : shock.closed_stations) {
          if (c == s) { closed = true; break; }
        }
      }
      if (closed) continue;  // exact zero

      // mean-one lognormal noise
      const double noise = sig > 0 ? std::exp(sig * z - 0.5 * sig * sig) : 1.0;
      const double yearly =
          1.0 + scenario.yearly_amplitude *
                    std::sin(2.0 * M_PI * date.day_of_year() / 365.25);
      const double v = base * scenario.weekly_profile[date.day_of_week()] *
                       yearly * mult * noise;
      counts[static_cast<std::size_t>(s) * D + d] =
          std::max<std::int64_t>(0, std::llround(v));
    }
  }

  std::vector<std::string> names;
  names.reserve(S);
  for (int s = 0; s < S; ++s) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%03d", s);
    names.emplace_back(buf);
  }
  return RidershipPanel(std::move(names), scenario.start_date,
                        std::move(counts), calendar);
}

}  // namespace ridebench
