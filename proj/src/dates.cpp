#include "ridebench/dates.hpp"

#include <cstdio>
#include <fstream>

#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"

namespace ridebench {

namespace {

// Civil-date algorithms (proleptic Gregorian), days relative to 1970-01-01.
int days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int>(doe) - 719468;
}

void civil_from_days(int z, int& y, int& m, int& d) {
  z += 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<int>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y += m <= 2;
}

}  // namespace

Date Date::from_ymd(int year, int month, int day) {
  if (month < 1 || month > 12 || day < 1 || day > 31) {
    throw DataError("invalid calendar date: " + std::to_string(year) + "-" +
                    std::to_string(month) + "-" + std::to_string(day));
  }
  return Date(days_from_civil(year, month, day));
}

Date Date::from_iso(const std::string& iso) {
  int y = 0, m = 0, d = 0;
  char extra = 0;
  if (std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &extra) != 3) {
    throw DataError("not an ISO-8601 date: '" + iso + "'");
  }
  Date date = from_ymd(y, m, d);
  if (date.to_iso() != trim(iso)) {
    throw DataError("not a valid calendar date: '" + iso + "'");
  }
  return date;
}

std::string Date::to_iso() const {
  int y, m, d;
  to_ymd(y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

void Date::to_ymd(int& year, int& month, int& day) const {
  civil_from_days(serial_, year, month, day);
}

int Date::day_of_week() const {
  // 1970-01-01 was a Thursday (index 3 in a Monday-first week).
  int w = (serial_ + 3) % 7;
  return w < 0 ? w + 7 : w;
}

int Date::day_of_year() const {
  int y, m, d;
  to_ymd(y, m, d);
  return serial_ - days_from_civil(y, 1, 1) + 1;
}

CalendarSpec CalendarSpec::from_file(const std::string& path,
                                     bool sundays_as_holiday) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open calendar file: " + path);
  CalendarSpec spec;
  spec.treat_sundays_as_holiday = sundays_as_holiday;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    try {
      spec.holiday_dates.insert(Date::from_iso(t));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return spec;
}

}  // namespace ridebench
