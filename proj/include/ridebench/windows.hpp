#pragma once

#include <vector>

#include "ridebench/normalize.hpp"
#include "ridebench/panel.hpp"

namespace ridebench {

inline constexpr int kLookbackDays = 21;
inline constexpr int kHorizonDays = 7;
inline constexpr int kFeaturesPerDay = 6;

// Per-day feature vector:
//   [is_saturday, is_holiday,
//    sin(2*pi*dow/7), cos(2*pi*dow/7),
//    sin(2*pi*doy/365.25), cos(2*pi*doy/365.25)]
std::vector<double> temporal_features(Date date, const CalendarSpec& calendar);

// One supervised example: three weeks of normalized history predicting the
// next seven days. `station` is -1 for multi-output windows (all stations),
// otherwise the single station the window belongs to.
struct SupervisedWindow {
  Date origin;   // first target day; lookback covers [origin-21, origin-1]
  int station;   // -1 = all stations
  std::vector<double> lookback;  // [stations_in * 21], station-major
  std::vector<double> features;  // [7 * kFeaturesPerDay], target-day-major
  std::vector<double> target;    // [stations_out * 7], station-major

  int stations_in(int panel_stations) const {
    return station < 0 ? panel_stations : 1;
  }
};

enum class OutputDesign { kSingle, kMulti };

// Windows whose lookback and target both lie inside `range`. With stride 1
// a D-day range yields D - 27 windows. For the single design, pass the
// station to slice; for multi, all stations are packed into each window.
std::vector<SupervisedWindow> make_windows(const RidershipPanel& panel,
                                           const NormalizationState& norm,
                                           OutputDesign design,
                                           const DateRange& range,
                                           int station = -1, int stride = 1);

// One window for forecast origin `origin`: lookback is the latest 21 days
// before it, target days may extend beyond `panel` truth availability is
// the caller's concern. Used by the rolling-origin runner.
SupervisedWindow make_forecast_window(const RidershipPanel& panel,
                                      const NormalizationState& norm,
                                      OutputDesign design, Date origin,
                                      int station = -1);

// Valid forecast origins inside `test_range`: lookback fits in the panel
// and all 7 target days still lie inside the range.
std::vector<Date> enumerate_origins(const RidershipPanel& panel,
                                    const DateRange& test_range);

}  // namespace ridebench
