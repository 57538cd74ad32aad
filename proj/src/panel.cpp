#include "ridebench/panel.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"

namespace ridebench {

RidershipPanel::RidershipPanel(std::vector<std::string> stations,
                               Date start_date,
                               std::vector<std::int64_t> counts,
                               const CalendarSpec& calendar)
    : stations_(std::move(stations)),
      start_(start_date),
      counts_(std::move(counts)),
      calendar_(calendar) {
  if (stations_.empty()) throw DataError("panel has no stations");
  if (counts_.size() % stations_.size() != 0) {
    throw DataError("count matrix size does not match station count");
  }
  n_days_ = static_cast<int>(counts_.size() / stations_.size());
  if (n_days_ == 0) throw DataError("panel has no days");
  for (std::int64_t c : counts_) {
    if (c < 0) throw DataError("panel contains a negative count");
  }
  saturday_.resize(n_days_);
  holiday_.resize(n_days_);
  for (int i = 0; i < n_days_; ++i) {
    Date d = start_ + i;
    saturday_[i] = d.is_saturday() ? 1 : 0;
    holiday_[i] = calendar_.is_holiday(d) ? 1 : 0;
  }
}

namespace {

std::int64_t parse_count(const std::string& s, int line) {
  std::string t = trim(s);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw DataError("line " + std::to_string(line) +
                    ": count is not an integer: '" + s + "'");
  }
  if (v < 0) {
    throw DataError("line " + std::to_string(line) +
                    ": negative count " + std::to_string(v));
  }
  return v;
}

}  // namespace

RidershipPanel ingest_csv(const std::string& path, const CalendarSpec& calendar,
                          IngestReport* report) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next_row(fields)) throw DataError(path + ": empty file");
  if (fields.size() != 3 || trim(fields[0]) != "date" ||
      trim(fields[1]) != "station_id" || trim(fields[2]) != "count") {
    throw DataError(path + ": expected header 'date,station_id,count'");
  }

  IngestReport local;
  IngestReport& rep = report ? *report : local;

  std::vector<std::string> stations;           // first-appearance order
  std::map<std::string, int> station_index;
  struct Cell { int station; std::int64_t count; };
  std::map<int, std::vector<Cell>> by_day;     // date serial -> cells
  int min_serial = 0, max_serial = 0;
  bool any = false;

  while (reader.next_row(fields)) {
    const int line = reader.line_number();
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;  // blank line
    if (fields.size() != 3) {
      throw DataError("line " + std::to_string(line) +
                      ": expected 3 fields, got " +
                      std::to_string(fields.size()));
    }
    Date d;
    try {
      d = Date::from_iso(trim(fields[0]));
    } catch (const DataError& e) {
      throw DataError("line " + std::to_string(line) + ": " + e.what());
    }
    std::string sid = trim(fields[1]);
    if (sid.empty()) {
      throw DataError("line " + std::to_string(line) + ": empty station_id");
    }
    std::int64_t c = parse_count(fields[2], line);

    auto [it, inserted] =
        station_index.emplace(sid, static_cast<int>(stations.size()));
    if (inserted) stations.push_back(sid);
    by_day[d.serial()].push_back({it->second, c});
    ++rep.rows_read;
    if (!any || d.serial() < min_serial) min_serial = d.serial();
    if (!any || d.serial() > max_serial) max_serial = d.serial();
    any = true;
  }
  if (!any) throw DataError(path + ": no data rows");

  const int n_days = max_serial - min_serial + 1;
  const int n_stations = static_cast<int>(stations.size());
  std::vector<std::int64_t> counts(
      static_cast<std::size_t>(n_stations) * n_days, 0);
  std::vector<char> seen(static_cast<std::size_t>(n_stations) * n_days, 0);

  for (const auto& [serial, cells] : by_day) {
    const int day = serial - min_serial;
    for (const Cell& cell : cells) {
      const std::size_t idx =
          static_cast<std::size_t>(cell.station) * n_days + day;
      if (seen[idx]) ++rep.duplicate_rows;
      counts[idx] = cell.count;
      seen[idx] = 1;
    }
  }

  for (int day = 0; day < n_days; ++day) {
    if (by_day.find(min_serial + day) == by_day.end()) ++rep.gap_days;
  }
  for (char s : seen) {
    if (!s) ++rep.cells_imputed;
  }
  if (rep.gap_days > 0) {
    rep.warnings.push_back(std::to_string(rep.gap_days) +
                           " day(s) absent from the file; filled with zeros");
  }
  if (rep.cells_imputed > 0) {
    rep.warnings.push_back(std::to_string(rep.cells_imputed) +
                           " cell(s) imputed to 0");
  }

  return RidershipPanel(std::move(stations), Date(min_serial),
                        std::move(counts), calendar);
}

void export_csv(const RidershipPanel& panel, const std::string& path) {
  std::ostringstream out;
  out << "date,station_id,count\n";
  for (int day = 0; day < panel.n_days(); ++day) {
    const std::string iso = panel.date(day).to_iso();
    for (int s = 0; s < panel.n_stations(); ++s) {
      out << iso << ',' << panel.stations()[s] << ',' << panel.count(s, day)
          << '\n';
    }
  }
  write_text_file(path, out.str());
}

}  // namespace ridebench
