#include "ridebench/forecast_log.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"

namespace ridebench {

std::string ForecastLog::to_csv() const {
  std::ostringstream out;
  out << "experiment,station,origin,horizon,pred,truth\n";
  for (const auto& r : records) {
    out << experiment << ',' << stations[r.station] << ',' << r.origin.to_iso()
        << ',' << r.horizon << ',' << format_double(r.pred) << ','
        << format_double(r.truth) << '\n';
  }
  return out.str();
}

ForecastLog ForecastLog::from_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next_row(fields) || fields.size() != 6 ||
      trim(fields[0]) != "experiment") {
    throw DataError(path + ": expected forecast log header");
  }
  ForecastLog log;
  std::map<std::string, int> station_index;
  while (reader.next_row(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() != 6) {
      throw DataError(path + ":" + std::to_string(reader.line_number()) +
                      ": expected 6 fields");
    }
    if (log.experiment.empty()) log.experiment = fields[0];
    ForecastRecord r;
    auto [it, inserted] = station_index.emplace(
        fields[1], static_cast<int>(log.stations.size()));
    if (inserted) log.stations.push_back(fields[1]);
    r.station = it->second;
    r.origin = Date::from_iso(fields[2]);
    r.horizon = std::stoi(fields[3]);
    r.pred = std::stod(fields[4]);
    r.truth = std::stod(fields[5]);
    log.records.push_back(r);
  }
  return log;
}

void ForecastLog::sort_canonical() {
  std::sort(records.begin(), records.end(),
            [](const ForecastRecord& a, const ForecastRecord& b) {
              if (a.origin != b.origin) return a.origin < b.origin;
              if (a.station != b.station) return a.station < b.station;
              return a.horizon < b.horizon;
            });
}

}  // namespace ridebench
