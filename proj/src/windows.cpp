#include "ridebench/windows.hpp"

#include <cmath>

#include "ridebench/errors.hpp"

namespace ridebench {

std::vector<double> temporal_features(Date date, const CalendarSpec& calendar) {
  const double dow = date.day_of_week();
  const double doy = date.day_of_year();
  const double wk = 2.0 * M_PI * dow / 7.0;
  const double yr = 2.0 * M_PI * doy / 365.25;
  return {date.is_saturday() ? 1.0 : 0.0,
          calendar.is_holiday(date) ? 1.0 : 0.0,
          std::sin(wk), std::cos(wk),
          std::sin(yr), std::cos(yr)};
}

namespace {

SupervisedWindow build_window(const RidershipPanel& panel,
                              const NormalizationState& norm, Date origin,
                              int station, bool with_target) {
  SupervisedWindow w;
  w.origin = origin;
  w.station = station;
  const int o = panel.day_index(origin);

  const int s_begin = station < 0 ? 0 : station;
  const int s_end = station < 0 ? panel.n_stations() : station + 1;

  w.lookback.reserve(static_cast<std::size_t>(s_end - s_begin) * kLookbackDays);
  for (int s = s_begin; s < s_end; ++s) {
    for (int k = 0; k < kLookbackDays; ++k) {
      const int day = o - kLookbackDays + k;
      w.lookback.push_back(norm.normalize(
          static_cast<double>(panel.count(s, day)), s));
    }
  }

  w.features.reserve(kHorizonDays * kFeaturesPerDay);
  for (int h = 0; h < kHorizonDays; ++h) {
    const auto f = temporal_features(origin + h, panel.calendar());
    w.features.insert(w.features.end(), f.begin(), f.end());
  }

  if (with_target) {
    w.target.reserve(static_cast<std::size_t>(s_end - s_begin) * kHorizonDays);
    for (int s = s_begin; s < s_end; ++s) {
      for (int h = 0; h < kHorizonDays; ++h) {
        w.target.push_back(norm.normalize(
            static_cast<double>(panel.count(s, o + h)), s));
      }
    }
  }
  return w;
}

}  // namespace

std::vector<SupervisedWindow> make_windows(const RidershipPanel& panel,
                                           const NormalizationState& norm,
                                           OutputDesign design,
                                           const DateRange& range,
                                           int station, int stride) {
  if (!panel.covers(range)) {
    throw DataError("window range outside panel");
  }
  const int min_len = kLookbackDays + kHorizonDays;
  if (range.length() < min_len) {
    throw DataError("range too short for windows: need at least " +
                    std::to_string(min_len) + " days, got " +
                    std::to_string(range.length()));
  }
  if (design == OutputDesign::kSingle &&
      (station < 0 || station >= panel.n_stations())) {
    throw DataError("single-output windows need a valid station index");
  }
  const int target_station = design == OutputDesign::kMulti ? -1 : station;

  std::vector<SupervisedWindow> out;
  const int first = panel.day_index(range.first) + kLookbackDays;
  const int last = panel.day_index(range.last) - (kHorizonDays - 1);
  for (int o = first; o <= last; o += stride) {
    out.push_back(build_window(panel, norm, panel.date(o), target_station,
                               /*with_target=*/true));
  }
  return out;
}

SupervisedWindow make_forecast_window(const RidershipPanel& panel,
                                      const NormalizationState& norm,
                                      OutputDesign design, Date origin,
                                      int station) {
  const int o = panel.day_index(origin);
  if (o < kLookbackDays) {
    throw DataError("forecast origin " + origin.to_iso() +
                    " lacks a full lookback");
  }
  const int target_station = design == OutputDesign::kMulti ? -1 : station;
  return build_window(panel, norm, origin, target_station,
                      /*with_target=*/false);
}

std::vector<Date> enumerate_origins(const RidershipPanel& panel,
                                    const DateRange& test_range) {
  std::vector<Date> out;
  for (Date d = test_range.first; d <= test_range.last; ++d) {
    if (panel.day_index(d) < kLookbackDays) continue;
    if (d + (kHorizonDays - 1) > test_range.last) break;
    out.push_back(d);
  }
  return out;
}

}  // namespace ridebench
