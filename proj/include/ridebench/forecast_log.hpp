#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ridebench/dates.hpp"

namespace ridebench {

// One prediction: station s, forecast origin t, horizon h in 1..7, both
// values in original (denormalized) units.
struct ForecastRecord {
  int station = 0;        // index into ForecastLog::stations
  Date origin;
  int horizon = 1;        // 1..7; target day = origin + horizon - 1
  double pred = 0.0;      // clamped to >= 0 at denormalization
  double truth = 0.0;
};

// Complete record of one experiment cell: exactly one entry per
// (station, origin, horizon) over the test range, in (origin, station,
// horizon) order.
struct ForecastLog {
  std::string experiment;
  std::vector<std::string> stations;
  std::vector<ForecastRecord> records;

  // CSV: experiment,station,origin,horizon,pred,truth
  std::string to_csv() const;
  static ForecastLog from_csv(const std::string& path);

  void sort_canonical();  // (origin, station, horizon)
};

}  // namespace ridebench
