#include "ridebench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"

namespace ridebench {

double aape(double truth, double pred) {
  if (truth < 0 || pred < 0) {
    throw DataError("aape: inputs must be nonnegative (truth=" +
                    format_double(truth) + ", pred=" + format_double(pred) +
                    ")");
  }
  if (truth == 0.0) {
    return pred == 0.0 ? 0.0 : M_PI / 2.0;
  }
  return std::atan(std::abs(pred - truth) / truth);
}

double system_maape(const ForecastLog& log, Date origin) {
  const int s = static_cast<int>(log.stations.size());
  std::vector<char> seen(static_cast<std::size_t>(s) * 7, 0);
  double sum = 0.0;
  int n = 0;
  for (const auto& r : log.records) {
    if (r.origin != origin) continue;
    sum += aape(r.truth, r.pred);
    seen[static_cast<std::size_t>(r.station) * 7 + (r.horizon - 1)] = 1;
    ++n;
  }
  if (n != s * 7) {
    std::ostringstream gaps;
    for (int st = 0; st < s; ++st) {
      for (int h = 0; h < 7; ++h) {
        if (!seen[static_cast<std::size_t>(st) * 7 + h]) {
          gaps << ' ' << log.stations[st] << "/h" << (h + 1);
        }
      }
    }
    throw DataError("incomplete log at origin " + origin.to_iso() +
                    "; missing:" + gaps.str());
  }
  return sum / n;
}

std::vector<double> rolling_mean(const std::vector<double>& series,
                                 int window) {
  std::vector<double> out(series.size(),
                          std::numeric_limits<double>::quiet_NaN());
  if (static_cast<int>(series.size()) < window) return out;
  double acc = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    acc += series[i];
    if (i >= static_cast<std::size_t>(window)) acc -= series[i - window];
    if (i + 1 >= static_cast<std::size_t>(window)) {
      out[i] = acc / window;
    }
  }
  return out;
}

MaapeSeries maape_series(const ForecastLog& log, int rolling_window) {
  // Group once instead of rescanning the log per origin.
  std::map<Date, std::pair<double, int>> acc;
  for (const auto& r : log.records) {
    auto& a = acc[r.origin];
    a.first += aape(r.truth, r.pred);
    a.second += 1;
  }
  const int expected = static_cast<int>(log.stations.size()) * 7;
  MaapeSeries series;
  series.experiment = log.experiment;
  for (const auto& [date, a] : acc) {
    if (a.second != expected) {
      throw DataError("incomplete log at origin " + date.to_iso() + ": " +
                      std::to_string(a.second) + " of " +
                      std::to_string(expected) + " records");
    }
    series.dates.push_back(date);
    series.daily.push_back(a.first / a.second);
  }
  series.rolling7 = rolling_mean(series.daily, rolling_window);
  return series;
}

std::string MaapeSeries::to_csv() const {
  std::ostringstream out;
  out << "experiment,date,maape,rolling7\n";
  for (std::size_t i = 0; i < dates.size(); ++i) {
    out << experiment << ',' << dates[i].to_iso() << ','
        << format_double(daily[i]) << ',';
    if (!std::isnan(rolling7[i])) out << format_double(rolling7[i]);
    out << '\n';
  }
  return out.str();
}

MaapeSeries MaapeSeries::from_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next_row(fields) || fields.size() != 4 ||
      trim(fields[0]) != "experiment") {
    throw DataError(path + ": expected maape series header");
  }
  MaapeSeries s;
  while (reader.next_row(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() != 4) {
      throw DataError(path + ":" + std::to_string(reader.line_number()) +
                      ": expected 4 fields");
    }
    if (s.experiment.empty()) s.experiment = fields[0];
    s.dates.push_back(Date::from_iso(fields[1]));
    s.daily.push_back(std::stod(fields[2]));
    s.rolling7.push_back(fields[3].empty()
                             ? std::numeric_limits<double>::quiet_NaN()
                             : std::stod(fields[3]));
  }
  return s;
}

ClosedStationReport closed_station_report(const ForecastLog& log,
                                          double threshold) {
  // A cell is a (station, target day) with zero truth; it may be covered by
  // up to 7 overlapping forecasts.
  struct Agg { double sum = 0, mx = 0; int n = 0; };
  std::map<std::pair<int, int>, Agg> cells;  // (station, day serial)
  for (const auto& r : log.records) {
    if (r.truth != 0.0) continue;
    const Date day = r.origin + (r.horizon - 1);
    auto& a = cells[{r.station, day.serial()}];
    a.sum += r.pred;
    a.mx = std::max(a.mx, r.pred);
    a.n += 1;
  }
  ClosedStationReport rep;
  rep.threshold = threshold;
  int over = 0;
  for (const auto& [key, a] : cells) {
    ClosedStationCell c;
    c.station = log.stations[key.first];
    c.day = Date(key.second);
    c.mean_prediction = a.sum / a.n;
    c.max_prediction = a.mx;
    c.n_predictions = a.n;
    if (c.mean_prediction > threshold) ++over;
    rep.cells.push_back(std::move(c));
  }
  rep.nonzero_fraction =
      rep.cells.empty() ? 0.0 : static_cast<double>(over) / rep.cells.size();
  return rep;
}

std::string ClosedStationReport::to_csv() const {
  std::ostringstream out;
  out << "station,day,mean_prediction,max_prediction,n_predictions\n";
  for (const auto& c : cells) {
    out << c.station << ',' << c.day.to_iso() << ','
        << format_double(c.mean_prediction) << ','
        << format_double(c.max_prediction) << ',' << c.n_predictions << '\n';
  }
  return out.str();
}

}  // namespace ridebench
