#include <doctest.h>

#include <cmath>

#include "ridebench/arima.hpp"
#include "ridebench/rng.hpp"
#include "src/optimize.hpp"

using namespace ridebench;

namespace {

// Brute-force differencing oracle: apply the two lag polynomials one lag
// step at a time, in sequence.
std::vector<double> oracle_difference(std::vector<double> x, int d, int D,
                                      int m) {
  for (int k = 0; k < D; ++k) {
    std::vector<double> next;
    for (std::size_t t = m; t < x.size(); ++t) next.push_back(x[t] - x[t - m]);
    x = next;
  }
  for (int k = 0; k < d; ++k) {
    std::vector<double> next;
    for (std::size_t t = 1; t < x.size(); ++t) next.push_back(x[t] - x[t - 1]);
    x = next;
  }
  return x;
}

std::vector<double> simulate_ar1(double phi, double c, int n, Rng& rng,
                                 double sigma = 1.0) {
  std::vector<double> x(n);
  double prev = c / (1 - phi);
  for (int i = 0; i < n; ++i) {
    prev = c + phi * prev + sigma * rng.normal();
    x[i] = prev;
  }
  return x;
}

std::vector<double> simulate_ma1(double theta, int n, Rng& rng) {
  std::vector<double> x(n);
  double prev_e = rng.normal();
  for (int i = 0; i < n; ++i) {
    const double e = rng.normal();
    x[i] = e + theta * prev_e;
    prev_e = e;
  }
  return x;
}

}  // namespace

TEST_CASE("difference basics") {
  CHECK(difference({1, 2, 3, 4}, 1, 0, 0) == std::vector<double>{1, 1, 1});
  const std::vector<double> keep = {3, 1, 4, 1, 5};
  CHECK(difference(keep, 0, 0, 0) == keep);
  CHECK_THROWS_AS(difference({1, 2}, 2, 0, 0), ModelError);
}

TEST_CASE("difference d=1 D=1 m=7 matches the brute-force oracle") {
  Rng rng(42);
  std::vector<double> x;
  for (int i = 0; i < 20; ++i) x.push_back(static_cast<double>(rng.below(50)));
  auto got = difference(x, 1, 1, 7);
  auto want = oracle_difference(x, 1, 1, 7);
  REQUIRE(got.size() == 12);
  CHECK(got == want);
}

TEST_CASE("difference agrees with oracle for all small orders") {
  Rng rng(43);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x;
    for (int i = 0; i < 50; ++i) x.push_back(static_cast<double>(rng.below(100)));
    for (int d = 0; d <= 2; ++d) {
      for (int D = 0; D <= 1; ++D) {
        for (int m : {0, 7}) {
          if (m == 0 && D > 0) continue;
          auto got = difference(x, d, D, m);
          auto want = oracle_difference(x, d, D, m);
          CHECK(got == want);
          CHECK(got.size() == x.size() - d - D * m);
        }
      }
    }
  }
}

TEST_CASE("kpss: constant series is stationary with statistic 0") {
  std::vector<double> c(100, 3.5);
  auto res = kpss_stationarity(c);
  CHECK(res.statistic == 0.0);
  CHECK(res.stationary);
}

TEST_CASE("kpss monte carlo: random walks rejected, white noise accepted") {
  int nonstat = 0, stat = 0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(9000 + seed);
    std::vector<double> noise(500), walk(500);
    double acc = 0;
    for (int i = 0; i < 500; ++i) {
      noise[i] = rng.normal();
      acc += rng.normal();
      walk[i] = acc;
    }
    if (!kpss_stationarity(walk).stationary) ++nonstat;
    if (kpss_stationarity(noise).stationary) ++stat;
  }
  CHECK(nonstat >= 95);
  CHECK(stat >= 90);
}

TEST_CASE("estimate (0,0,0)+c recovers mean and variance of white noise") {
  Rng rng(7);
  std::vector<double> x;
  double mean = 0;
  for (int i = 0; i < 1500; ++i) {
    x.push_back(2.5 + rng.normal());
    mean += x.back();
  }
  mean /= x.size();
  double var = 0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= x.size();

  ArimaOrder order;
  order.with_constant = true;
  auto fit = estimate(x, order);
  CHECK(fit.constant == doctest::Approx(mean).epsilon(1e-6));
  CHECK(fit.sigma2 == doctest::Approx(var).epsilon(0.01));
  CHECK(fit.converged);
}

TEST_CASE("estimate recovers a simulated AR(1)") {
  Rng rng(11);
  auto x = simulate_ar1(0.7, 0.0, 2000, rng);
  ArimaOrder order;
  order.p = 1;
  auto fit = estimate(x, order);
  REQUIRE(fit.ar.size() == 1);
  CHECK(fit.ar[0] > 0.65);
  CHECK(fit.ar[0] < 0.75);
}

TEST_CASE("estimate recovers a simulated MA(1)") {
  Rng rng(13);
  auto x = simulate_ma1(0.5, 2000, rng);
  ArimaOrder order;
  order.q = 1;
  auto fit = estimate(x, order);
  REQUIRE(fit.ma.size() == 1);
  CHECK(fit.ma[0] > 0.44);
  CHECK(fit.ma[0] < 0.56);
}

TEST_CASE("estimate enforces the length precondition") {
  std::vector<double> tiny(12, 1.0);
  ArimaOrder order;
  order.p = 2;
  order.q = 2;
  CHECK_THROWS_AS(estimate(tiny, order), ModelError);
}

TEST_CASE("returned fits satisfy stationarity and invertibility margins") {
  Rng rng(17);
  for (int rep = 0; rep < 5; ++rep) {
    auto x = simulate_ar1(0.6, 0.1, 600, rng);
    ArimaOrder order;
    order.p = 2;
    order.q = 1;
    order.with_constant = true;
    auto fit = estimate(x, order);
    CHECK(max_inverse_root_modulus(fit.ar, true) < 1.0 / (1.0 + 1e-6));
    CHECK(max_inverse_root_modulus(fit.ma, false) < 1.0 / (1.0 + 1e-6));
  }
}

TEST_CASE("optimizer objective trace is non-increasing") {
  Rng rng(19);
  auto x = simulate_ar1(0.5, 0.0, 400, rng);
  // Re-run the optimizer directly on the CSS objective via estimate's path:
  // the monotone contract is on the line-searched BFGS itself.
  auto objective = [&x](const std::vector<double>& p) {
    // CSS of an AR(1) with coefficient p[0], penalized outside (-1, 1).
    if (std::abs(p[0]) >= 0.999) return 1e100;
    double acc = 0;
    for (std::size_t t = 1; t < x.size(); ++t) {
      const double e = x[t] - p[0] * x[t - 1];
      acc += e * e;
    }
    return acc;
  };
  auto res = detail::bfgs_minimize(objective, {0.0});
  CHECK(res.converged);
  for (std::size_t i = 1; i < res.objective_trace.size(); ++i) {
    CHECK(res.objective_trace[i] <= res.objective_trace[i - 1] + 1e-12);
  }
}

TEST_CASE("forecast of (0,0,0)+c is the constant") {
  Rng rng(23);
  std::vector<double> x;
  for (int i = 0; i < 300; ++i) x.push_back(5.0 + 0.1 * rng.normal());
  ArimaOrder order;
  order.with_constant = true;
  auto fit = estimate(x, order);
  auto fc = forecast(fit, x, 7);
  REQUIRE(fc.size() == 7);
  for (double v : fc) CHECK(v == doctest::Approx(fit.constant));
}

TEST_CASE("forecast of (0,1,0) is a random-walk carry forward") {
  Rng rng(29);
  std::vector<double> x;
  double acc = 100;
  for (int i = 0; i < 300; ++i) {
    acc += rng.normal();
    x.push_back(acc);
  }
  ArimaOrder order;
  order.d = 1;
  auto fit = estimate(x, order);
  auto fc = forecast(fit, x, 7);
  for (double v : fc) CHECK(v == doctest::Approx(x.back()).epsilon(1e-10));
}

TEST_CASE("AR(1) forecasts follow the closed-form recursion") {
  // Zero-noise deterministic check: series ending at 1.0, phi = 0.7. The
  // h-step forecast must be 0.7^h to high precision.
  std::vector<double> x;
  Rng rng(31);
  auto sim = simulate_ar1(0.7, 0.0, 1200, rng);
  x = sim;
  x.back() = 1.0;

  ArimaFit fit;
  fit.order.p = 1;
  fit.ar = {0.7};
  auto fc = forecast(fit, x, 7);
  double expect = 1.0;
  for (int h = 0; h < 7; ++h) {
    expect *= 0.7;
    CHECK(fc[h] == doctest::Approx(expect).epsilon(1e-10));
  }

  // Same closed form via an iterative zero-noise simulation oracle.
  double iter = 1.0;
  for (int h = 0; h < 7; ++h) {
    iter = 0.7 * iter;
    CHECK(fc[h] == doctest::Approx(iter).epsilon(1e-10));
  }
}

TEST_CASE("seasonal forecast integrates the weekly difference") {
  // Pure weekly pattern: SARIMA (0,0,0)(0,1,0)[7] must repeat the last week.
  std::vector<double> x;
  const double pattern[7] = {10, 12, 14, 16, 18, 6, 4};
  for (int i = 0; i < 140; ++i) x.push_back(pattern[i % 7]);
  ArimaFit fit;
  fit.order.D = 1;
  fit.order.m = 7;
  auto fc = forecast(fit, x, 7);
  for (int h = 0; h < 7; ++h) {
    CHECK(fc[h] == doctest::Approx(pattern[(140 + h) % 7]).epsilon(1e-10));
  }
}

TEST_CASE("update with no new observations keeps the coefficients") {
  Rng rng(37);
  auto x = simulate_ar1(0.7, 0.0, 800, rng);
  ArimaOrder order;
  order.p = 1;
  auto fit = estimate(x, order);
  auto fit2 = update(fit, x);
  CHECK(fit2.ar[0] == doctest::Approx(fit.ar[0]).epsilon(1e-6));
  CHECK(fit2.aic == doctest::Approx(fit.aic).epsilon(1e-6));
}

TEST_CASE("day-by-day updates keep tracking the AR coefficient") {
  Rng rng(41);
  auto x = simulate_ar1(0.7, 0.0, 2000, rng);
  std::vector<double> series(x.begin(), x.begin() + 1000);
  ArimaOrder order;
  order.p = 1;
  auto fit = estimate(series, order);
  for (int t = 1000; t < 2000; t += 25) {  // thinned walk keeps the test fast
    for (int k = 0; k < 25; ++k) series.push_back(x[t + k]);
    fit = update(fit, series);
    CHECK(fit.ar[0] > 0.6);
    CHECK(fit.ar[0] < 0.8);
  }
}

TEST_CASE("after a mean shift the updated constant converges to the new mean") {
  Rng rng(43);
  std::vector<double> series;
  for (int i = 0; i < 1000; ++i) series.push_back(1.0 + 0.2 * rng.normal());
  ArimaOrder order;
  order.with_constant = true;
  auto fit = estimate(series, order);
  CHECK(fit.constant == doctest::Approx(1.0).epsilon(0.05));

  // 200 days at the new level of 3.0; CSS weighs all observations, so the
  // constant moves toward the mixture mean.
  for (int i = 0; i < 200; ++i) series.push_back(3.0 + 0.2 * rng.normal());
  fit = update(fit, series);
  const double mixture = (1000 * 1.0 + 200 * 3.0) / 1200.0;
  CHECK(fit.constant == doctest::Approx(mixture).epsilon(0.05));
}

TEST_CASE("stepwise selects d >= 1 on a linear trend") {
  std::vector<double> x;
  Rng rng(47);
  for (int i = 0; i < 300; ++i) x.push_back(0.5 * i + rng.normal());
  std::vector<SearchLogEntry> log;
  auto fit = stepwise_select(x, false, 0, &log);
  CHECK(fit.order.d >= 1);
}

TEST_CASE("stepwise winner has the lowest AIC among evaluated models") {
  Rng rng(53);
  auto x = simulate_ar1(0.6, 0.0, 800, rng);
  std::vector<SearchLogEntry> log;
  auto fit = stepwise_select(x, false, 0, &log);
  REQUIRE(!log.empty());
  CHECK(log.size() <= 50);
  for (const auto& entry : log) {
    CHECK(fit.aic <= entry.aic + 1e-9);
  }
}

TEST_CASE("stepwise on white noise picks the null order most of the time") {
  // AIC-based selection keeps the null in ~70% of realizations; the chi^2
  // overfit channels (AR(1)/MA(1)/ARMA(2,2) flukes, KPSS size) account for
  // the rest. The full 100-seed sweep runs in the acceptance suite.
  int null_picked = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(100 + seed);
    std::vector<double> x;
    for (int i = 0; i < 1000; ++i) x.push_back(rng.normal());
    auto fit = stepwise_select(x, false, 0);
    if (fit.order.p == 0 && fit.order.q == 0 && fit.order.d == 0) ++null_picked;
  }
  CHECK(null_picked > seeds / 2);
}

TEST_CASE("stepwise recovers AR(2) structure") {
  int good = 0;
  const int seeds = 10;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(300 + seed);
    std::vector<double> x(2000);
    double x1 = 0, x2 = 0;
    for (int i = 0; i < 2000; ++i) {
      const double v = 0.5 * x1 - 0.3 * x2 + rng.normal();
      x[i] = v;
      x2 = x1;
      x1 = v;
    }
    auto fit = stepwise_select(x, false, 0);
    if (fit.order.p == 2 && fit.order.q <= 1) ++good;
  }
  CHECK(good >= seeds / 2 + 1);
}

TEST_CASE("seasonal stepwise handles a weekly pattern") {
  Rng rng(59);
  std::vector<double> x;
  const double pattern[7] = {5, 6, 7, 8, 9, 2, 1};
  for (int i = 0; i < 400; ++i) {
    x.push_back(pattern[i % 7] + 0.3 * rng.normal());
  }
  auto fit = stepwise_select(x, true, 7);
  CHECK(fit.order.m == 7);
  // The weekly cycle must be captured one way or another.
  CHECK((fit.order.D == 1 || fit.order.P > 0 || fit.order.Q > 0));
}

TEST_CASE("fit serialization round trips") {
  Rng rng(61);
  auto x = simulate_ar1(0.7, 0.2, 600, rng);
  ArimaOrder order;
  order.p = 1;
  order.with_constant = true;
  auto fit = estimate(x, order);
  auto restored = ArimaFit::from_text(fit.to_text());
  CHECK(restored.order.same_orders(fit.order));
  CHECK(restored.ar == fit.ar);
  CHECK(restored.constant == fit.constant);
  CHECK(restored.sigma2 == fit.sigma2);
  CHECK(restored.aic == fit.aic);
  CHECK(restored.n_obs == fit.n_obs);

  auto fc1 = forecast(fit, x, 7);
  auto fc2 = forecast(restored, x, 7);
  CHECK(fc1 == fc2);
}

TEST_CASE("order validation caps") {
  ArimaOrder order;
  order.p = 6;
  CHECK_THROWS_AS(order.validate(), ModelError);
  order = {};
  order.P = 1;  // seasonal terms need m >= 2
  CHECK_THROWS_AS(order.validate(), ModelError);
  order = {};
  order.d = 3;
  CHECK_THROWS_AS(order.validate(), ModelError);
}
