#pragma once

#include <string>
#include <vector>

#include "ridebench/errors.hpp"

namespace ridebench {

// (p,d,q)(P,D,Q)_m with an optional mean term. m = 0 means non-seasonal.
struct ArimaOrder {
  int p = 0, d = 0, q = 0;
  int P = 0, D = 0, Q = 0, m = 0;
  bool with_constant = false;

  int num_coeffs() const { return p + q + P + Q; }
  int num_params() const { return num_coeffs() + (with_constant ? 1 : 0); }
  void validate() const;  // caps: p,q <= 5; d <= 2; P,Q <= 2; D <= 1
  std::string to_string() const;
  bool same_orders(const ArimaOrder& o) const;
};

struct ArimaFit {
  ArimaOrder order;
  std::vector<double> ar, ma, seasonal_ar, seasonal_ma;
  double constant = 0.0;  // mean of the differenced series when enabled
  double sigma2 = 0.0;
  double aic = 0.0;
  int n_obs = 0;          // residuals actually summed in the CSS
  bool converged = true;

  std::vector<double> pack_params() const;

  // Self-describing text record for experiment resumption.
  std::string to_text() const;
  static ArimaFit from_text(const std::string& text);
};

// Thrown when the optimizer hits the iteration cap; the best parameters
// found so far are still usable.
class ConvergenceError : public ModelError {
public:
  ConvergenceError(const std::string& msg, ArimaFit best)
      : ModelError(msg), best_fit(std::move(best)) {}
  ArimaFit best_fit;
};

// (1-B)^d (1-B^m)^D applied to the series; output shrinks by d + D*m.
std::vector<double> difference(const std::vector<double>& series, int d,
                               int D, int m);

// KPSS level-stationarity test with Bartlett-kernel long-run variance,
// bandwidth floor(4*(n/100)^0.25). Nonstationary when the statistic exceeds
// the 5% critical value 0.463.
struct KpssResult {
  double statistic = 0.0;
  bool stationary = true;
  static constexpr double kCritical5pct = 0.463;
};
KpssResult kpss_stationarity(const std::vector<double>& series);

// Conditional-sum-of-squares fit by BFGS with numerical gradients, started
// from zeros (or `warm_start`). Candidates violating stationarity or
// invertibility are penalized to an effectively infinite objective.
// AIC = n*ln(sigma2) + 2k with k = #coefficients + constant flag + 1.
ArimaFit estimate(const std::vector<double>& series, const ArimaOrder& order,
                  const std::vector<double>* warm_start = nullptr);

// One (order, aic) entry per model evaluated during a stepwise search.
struct SearchLogEntry {
  ArimaOrder order;
  double aic;
};

// Stepwise order search: d (and D) from KPSS, the usual four starting
// candidates, then +/-1 neighborhood moves and a constant toggle, accepting
// strictly lower AIC, capped at 50 evaluated models.
ArimaFit stepwise_select(const std::vector<double>& series, bool seasonal,
                         int m, std::vector<SearchLogEntry>* search_log = nullptr);

// Recursive multi-step forecast on the differenced scale, integrated back.
std::vector<double> forecast(const ArimaFit& fit,
                             const std::vector<double>& series, int horizon = 7);

// Re-estimate the coefficients on an extended series with the orders held
// fixed, warm-started from the previous values.
ArimaFit update(const ArimaFit& fit, const std::vector<double>& extended_series);

// Largest root-reciprocal modulus of 1 - c1 z - ... - cp z^p (AR sign) or
// 1 + c1 z + ... + cq z^q (MA sign). Stationarity/invertibility holds when
// the result is < 1, i.e. all polynomial roots lie outside the unit circle.
double max_inverse_root_modulus(const std::vector<double>& coeffs, bool ar_sign);

// True when an AR factor nearly cancels an MA factor (root pair within
// `tol` in inverse-root space). The stepwise search rejects such fits as
// unidentified reparameterizations of smaller models.
bool has_common_factor(const ArimaFit& fit, double tol = 0.15);

}  // namespace ridebench
