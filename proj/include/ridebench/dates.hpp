#pragma once

#include <set>
#include <string>
#include <vector>

namespace ridebench {

// Calendar day, stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
public:
  Date() = default;
  explicit Date(int serial) : serial_(serial) {}
  static Date from_ymd(int year, int month, int day);
  static Date from_iso(const std::string& iso);  // "YYYY-MM-DD"

  int serial() const { return serial_; }
  std::string to_iso() const;
  void to_ymd(int& year, int& month, int& day) const;

  // 0 = Monday ... 5 = Saturday, 6 = Sunday
  int day_of_week() const;
  bool is_saturday() const { return day_of_week() == 5; }
  bool is_sunday() const { return day_of_week() == 6; }

  // 1-based day within the year
  int day_of_year() const;

  Date operator+(int days) const { return Date(serial_ + days); }
  Date operator-(int days) const { return Date(serial_ - days); }
  int operator-(Date other) const { return serial_ - other.serial_; }
  Date& operator++() { ++serial_; return *this; }
  auto operator<=>(const Date&) const = default;

private:
  int serial_ = 0;
};

// Inclusive date range.
struct DateRange {
  Date first;
  Date last;

  int length() const { return last - first + 1; }
  bool contains(Date d) const { return d >= first && d <= last; }
  bool empty() const { return last < first; }
};

// Holiday injection. Sundays count as holidays by default; Saturdays are
// always tracked separately.
struct CalendarSpec {
  std::set<Date> holiday_dates;
  bool treat_sundays_as_holiday = true;

  bool is_holiday(Date d) const {
    if (treat_sundays_as_holiday && d.is_sunday()) return true;
    return holiday_dates.count(d) > 0;
  }

  // Plain-text file, one ISO date per line; '#' comments and blank lines
  // are skipped.
  static CalendarSpec from_file(const std::string& path,
                                bool sundays_as_holiday = true);
};

}  // namespace ridebench
