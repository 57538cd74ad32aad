#include "ridebench/analysis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ridebench/csv.hpp"
#include "ridebench/errors.hpp"

namespace ridebench {

ConditionLabels label_conditions(const std::vector<Date>& dates,
                                 const ConditionSpec& spec,
                                 const CalendarSpec& calendar) {
  ConditionLabels L;
  L.dates = dates;
  const std::size_t n = dates.size();
  L.covid.resize(n);
  L.protest.resize(n);
  L.saturday.resize(n);
  L.holidays.resize(n);
  L.covid_saturday.resize(n);
  L.covid_holidays.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Date d = dates[i];
    L.covid[i] = spec.covid && spec.covid->contains(d) ? 1.0 : 0.0;
    L.protest[i] = spec.protest && spec.protest->contains(d) ? 1.0 : 0.0;
    L.saturday[i] = d.is_saturday() ? 1.0 : 0.0;
    L.holidays[i] = calendar.is_holiday(d) ? 1.0 : 0.0;
    L.covid_saturday[i] = L.covid[i] * L.saturday[i];
    L.covid_holidays[i] = L.covid[i] * L.holidays[i];
  }
  return L;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::string significance_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

int ConditionRegression::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

ConditionRegression fit_ols_design(const std::vector<double>& y,
                                   const std::vector<double>& X_rowmajor,
                                   const std::vector<std::string>& names,
                                   const std::string& experiment) {
  const int k = static_cast<int>(names.size());
  const int n = static_cast<int>(y.size());
  if (k == 0 || n == 0 || X_rowmajor.size() != static_cast<std::size_t>(n) * k) {
    throw ModelError("fit_ols: design matrix shape mismatch");
  }
  if (n < k + 2) {
    throw ModelError("fit_ols: need at least " + std::to_string(k + 2) +
                     " observations for " + std::to_string(k) +
                     " regressors, got " + std::to_string(n));
  }

  using RowMat =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> X(X_rowmajor.data(), n, k);
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    // The pivots beyond the numerical rank are the dependent columns.
    std::ostringstream bad;
    const auto perm = qr.colsPermutation().indices();
    for (int i = qr.rank(); i < k; ++i) bad << ' ' << names[perm[i]];
    throw ModelError("fit_ols: design matrix rank deficient; collinear:" +
                     bad.str());
  }

  Eigen::VectorXd beta = qr.solve(yv);
  Eigen::VectorXd resid = yv - X * beta;
  const double rss = resid.squaredNorm();
  const double sigma2 = rss / (n - k);
  Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(k, k));

  const double ybar = yv.mean();
  const double tss = (yv.array() - ybar).square().sum();

  ConditionRegression out;
  out.experiment = experiment;
  out.names = names;
  out.n = n;
  out.r_squared = tss > 0 ? 1.0 - rss / tss : 1.0;
  out.adj_r_squared =
      1.0 - (1.0 - out.r_squared) * (n - 1.0) / (n - k);
  for (int i = 0; i < k; ++i) {
    const double b = beta[i];
    const double s = std::sqrt(sigma2 * xtx_inv(i, i));
    const double t = s > 0 ? b / s : 0.0;
    const double p = 2.0 * (1.0 - normal_cdf(std::abs(t)));
    out.coef.push_back(b);
    out.se.push_back(s);
    out.t_stat.push_back(t);
    out.p_value.push_back(p);
    out.stars.push_back(significance_stars(p));
  }
  return out;
}

ConditionRegression fit_ols(const std::vector<double>& y,
                            const ConditionLabels& labels,
                            const std::string& experiment) {
  const std::size_t n = y.size();
  if (n != labels.size()) {
    throw ModelError("fit_ols: series and labels have different lengths");
  }
  const std::vector<std::string> names = {
      "Intercept",      "covid",          "protest", "saturday",
      "holidays",       "covid:saturday", "covid:holidays"};
  std::vector<double> X;
  X.reserve(n * names.size());
  for (std::size_t i = 0; i < n; ++i) {
    X.push_back(1.0);
    X.push_back(labels.covid[i]);
    X.push_back(labels.protest[i]);
    X.push_back(labels.saturday[i]);
    X.push_back(labels.holidays[i]);
    X.push_back(labels.covid_saturday[i]);
    X.push_back(labels.covid_holidays[i]);
  }
  return fit_ols_design(y, X, names, experiment);
}

CellComparison compare_cells(const ConditionRegression& a,
                             const ConditionRegression& b,
                             const std::string& coefficient) {
  const int ia = a.index_of(coefficient);
  const int ib = b.index_of(coefficient);
  if (ia < 0 || ib < 0) {
    throw ModelError("compare_cells: coefficient '" + coefficient +
                     "' missing from one of the fits");
  }
  CellComparison c;
  c.diff = a.coef[ia] - b.coef[ib];
  const double denom = std::sqrt(a.se[ia] * a.se[ia] + b.se[ib] * b.se[ib]);
  if (denom == 0.0) {
    c.z = c.diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  } else {
    c.z = c.diff / denom;
  }
  c.p_value = c.diff == 0.0 ? 1.0 : 2.0 * (1.0 - normal_cdf(std::abs(c.z)));
  c.significant_5pct = c.p_value < 0.05;
  return c;
}

std::string ConditionRegression::to_csv() const {
  std::ostringstream out;
  out << "experiment,term,coef,se,t,p,stars\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << experiment << ',' << names[i] << ',' << format_double(coef[i])
        << ',' << format_double(se[i]) << ',' << format_double(t_stat[i])
        << ',' << format_double(p_value[i]) << ',' << stars[i] << '\n';
  }
  out << experiment << ",r_squared," << format_double(r_squared) << ",,,,\n";
  out << experiment << ",adj_r_squared," << format_double(adj_r_squared)
      << ",,,,\n";
  out << experiment << ",n," << n << ",,,,\n";
  return out.str();
}

ConditionRegression ConditionRegression::from_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next_row(fields) || fields.size() != 7 ||
      trim(fields[0]) != "experiment") {
    throw DataError(path + ": expected regression header");
  }
  ConditionRegression out;
  while (reader.next_row(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() != 7) {
      throw DataError(path + ":" + std::to_string(reader.line_number()) +
                      ": expected 7 fields");
    }
    if (out.experiment.empty()) out.experiment = fields[0];
    const std::string& term = fields[1];
    if (term == "r_squared") {
      out.r_squared = std::stod(fields[2]);
    } else if (term == "adj_r_squared") {
      out.adj_r_squared = std::stod(fields[2]);
    } else if (term == "n") {
      out.n = std::stoi(fields[2]);
    } else {
      out.names.push_back(term);
      out.coef.push_back(std::stod(fields[2]));
      out.se.push_back(std::stod(fields[3]));
      out.t_stat.push_back(std::stod(fields[4]));
      out.p_value.push_back(std::stod(fields[5]));
      out.stars.push_back(fields[6]);
    }
  }
  return out;
}

std::string format_regression_table(
    const std::vector<ConditionRegression>& fits) {
  if (fits.empty()) return "";
  const auto& names = fits[0].names;
  const int label_w = 16;
  std::size_t col_w = 14;
  for (const auto& f : fits) col_w = std::max(col_w, f.experiment.size() + 2);

  auto fmt3 = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
  };
  auto pad = [](const std::string& s, std::size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
  };

  std::ostringstream out;
  out << pad("", label_w);
  for (const auto& f : fits) out << pad(f.experiment, col_w);
  out << '\n';
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << pad(names[i], label_w);
    for (const auto& f : fits) out << pad(fmt3(f.coef[i]) + f.stars[i], col_w);
    out << '\n';
    out << pad("", label_w);
    for (const auto& f : fits) out << pad("(" + fmt3(f.se[i]) + ")", col_w);
    out << '\n';
  }
  out << pad("R-squared", label_w);
  for (const auto& f : fits) out << pad(fmt3(f.r_squared), col_w);
  out << '\n';
  out << pad("R-squared Adj.", label_w);
  for (const auto& f : fits) out << pad(fmt3(f.adj_r_squared), col_w);
  out << '\n';
  out << pad("N", label_w);
  for (const auto& f : fits) out << pad(std::to_string(f.n), col_w);
  out << '\n';
  return out.str();
}

}  // namespace ridebench
