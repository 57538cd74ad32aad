#pragma once

#include <string>
#include <vector>

#include "ridebench/dates.hpp"
#include "ridebench/forecast_log.hpp"
#include "ridebench/panel.hpp"

namespace ridebench {

// Arctangent absolute percentage error, in [0, pi/2].
// Conventions: truth 0 and pred 0 -> 0; truth 0 and pred > 0 -> pi/2.
double aape(double truth, double pred);

// Daily system-wide error series: per forecast origin t, the mean AAPE over
// all stations and the 7 horizons issued from t. The rolling series is the
// trailing 7-day mean, defined from the seventh day onward.
struct MaapeSeries {
  std::string experiment;
  std::vector<Date> dates;       // forecast origins, ascending
  std::vector<double> daily;     // MAAPE_t
  std::vector<double> rolling7;  // NaN for the first window-1 entries

  std::string to_csv() const;    // experiment,date,maape,rolling7
  static MaapeSeries from_csv(const std::string& path);
};

// Mean AAPE over every record issued from origin t. Throws DataError listing
// the gaps if the log is incomplete for that origin.
double system_maape(const ForecastLog& log, Date origin);

// Full series over every origin present in the log.
MaapeSeries maape_series(const ForecastLog& log, int rolling_window = 7);

std::vector<double> rolling_mean(const std::vector<double>& series,
                                 int window = 7);

// Predictions issued for station-days whose true count was zero.
struct ClosedStationCell {
  std::string station;
  Date day;                 // target day with zero truth
  double mean_prediction;   // mean over the origins covering the day
  double max_prediction;
  int n_predictions;
};

struct ClosedStationReport {
  std::vector<ClosedStationCell> cells;
  double nonzero_fraction = 0.0;  // cells with mean prediction > threshold
  double threshold = 1.0;

  std::string to_csv() const;
};

ClosedStationReport closed_station_report(const ForecastLog& log,
                                          double threshold = 1.0);

}  // namespace ridebench
