#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ridebench/dates.hpp"

namespace ridebench {

// Station x day matrix of daily transaction counts with calendar flags.
// Dates are contiguous; counts are nonnegative integers. Immutable after
// construction and safe to share across threads.
class RidershipPanel {
public:
  RidershipPanel(std::vector<std::string> stations, Date start_date,
                 std::vector<std::int64_t> counts,  // [station][day], row-major
                 const CalendarSpec& calendar);

  int n_stations() const { return static_cast<int>(stations_.size()); }
  int n_days() const { return n_days_; }
  const std::vector<std::string>& stations() const { return stations_; }

  Date start_date() const { return start_; }
  Date end_date() const { return start_ + (n_days_ - 1); }
  Date date(int day_index) const { return start_ + day_index; }
  int day_index(Date d) const { return d - start_; }
  bool covers(const DateRange& r) const {
    return r.first >= start_ && r.last <= end_date();
  }

  std::int64_t count(int station, int day_index) const {
    return counts_[static_cast<std::size_t>(station) * n_days_ + day_index];
  }

  bool saturday(int day_index) const { return saturday_[day_index]; }
  bool holiday(int day_index) const { return holiday_[day_index]; }
  const CalendarSpec& calendar() const { return calendar_; }

private:
  std::vector<std::string> stations_;
  Date start_;
  int n_days_;
  std::vector<std::int64_t> counts_;
  std::vector<char> saturday_;
  std::vector<char> holiday_;
  CalendarSpec calendar_;
};

struct IngestReport {
  int rows_read = 0;
  int cells_imputed = 0;   // missing (date, station) cells filled with 0
  int gap_days = 0;        // whole days absent from the file
  int duplicate_rows = 0;  // same (date, station) seen again; last value wins
  std::vector<std::string> warnings;
};

// Long-format CSV: header "date,station_id,count", ISO-8601 dates, UTF-8,
// LF or CRLF. Stations keep first-appearance order. Missing cells impute
// to zero and are reported; negative counts are a hard error naming the line.
RidershipPanel ingest_csv(const std::string& path, const CalendarSpec& calendar,
                          IngestReport* report = nullptr);

// Inverse of ingest_csv: date-major long CSV with the same header.
// ingest(export(panel)) reproduces the panel exactly.
void export_csv(const RidershipPanel& panel, const std::string& path);

}  // namespace ridebench
