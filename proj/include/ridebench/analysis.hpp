#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ridebench/dates.hpp"

namespace ridebench {

// Date ranges of the two disruption regimes. Overlaps are allowed; both
// dummies are set where ranges intersect.
struct ConditionSpec {
  std::optional<DateRange> covid;
  std::optional<DateRange> protest;
};

// Daily regime dummies plus the two interaction columns.
struct ConditionLabels {
  std::vector<Date> dates;
  std::vector<double> covid;
  std::vector<double> protest;
  std::vector<double> saturday;
  std::vector<double> holidays;
  std::vector<double> covid_saturday;
  std::vector<double> covid_holidays;

  std::size_t size() const { return dates.size(); }
};

ConditionLabels label_conditions(const std::vector<Date>& dates,
                                 const ConditionSpec& spec,
                                 const CalendarSpec& calendar);

// OLS of the daily error series on the condition dummies. Plain
// (non-robust) standard errors; p-values from the normal approximation;
// stars *** / ** / * at 1% / 5% / 10%, with boundary ties going to the
// weaker star.
struct ConditionRegression {
  std::string experiment;
  std::vector<std::string> names;  // intercept first
  std::vector<double> coef;
  std::vector<double> se;
  std::vector<double> t_stat;
  std::vector<double> p_value;
  std::vector<std::string> stars;
  double r_squared = 0.0;
  double adj_r_squared = 0.0;
  int n = 0;

  int index_of(const std::string& name) const;  // -1 when absent
  std::string to_csv() const;
  static ConditionRegression from_csv(const std::string& path);
};

ConditionRegression fit_ols(const std::vector<double>& y,
                            const ConditionLabels& labels,
                            const std::string& experiment = "");

// Generic OLS with an explicit design matrix (row-major), used by fit_ols
// and directly by tests. Throws ModelError naming collinear columns when X
// is rank deficient.
ConditionRegression fit_ols_design(const std::vector<double>& y,
                                   const std::vector<double>& X_rowmajor,
                                   const std::vector<std::string>& names,
                                   const std::string& experiment = "");

std::string significance_stars(double p);
double normal_cdf(double x);

// Two-sample z comparison of one coefficient across independently fitted
// cells.
struct CellComparison {
  double diff = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  bool significant_5pct = false;
};

CellComparison compare_cells(const ConditionRegression& a,
                             const ConditionRegression& b,
                             const std::string& coefficient);

// Fixed-width text table: one column per experiment, coefficient rows with
// the standard error parenthesized beneath, then R^2, adjusted R^2 and N.
std::string format_regression_table(
    const std::vector<ConditionRegression>& fits);

}  // namespace ridebench
