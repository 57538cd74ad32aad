#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace ridebench::detail {

struct BfgsResult {
  std::vector<double> x;
  double fx = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_trace;  // accepted values; non-increasing
};

// BFGS with central-difference gradients and Armijo backtracking. The
// objective may return huge values (penalty region); the line search simply
// rejects those steps.
inline BfgsResult bfgs_minimize(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, int max_iters = 200, double grad_tol = 1e-6,
    double fd_step = 1e-5) {
  const int n = static_cast<int>(x0.size());
  BfgsResult res;
  res.x = std::move(x0);
  res.fx = f(res.x);
  res.objective_trace.push_back(res.fx);
  if (n == 0) {
    res.converged = true;
    return res;
  }

  auto gradient = [&](const std::vector<double>& x, std::vector<double>& g) {
    std::vector<double> xp = x;
    for (int i = 0; i < n; ++i) {
      const double h = fd_step * std::max(1.0, std::abs(x[i]));
      xp[i] = x[i] + h;
      const double fp = f(xp);
      xp[i] = x[i] - h;
      const double fm = f(xp);
      xp[i] = x[i];
      g[i] = (fp - fm) / (2.0 * h);
    }
  };

  std::vector<double> g(n), g_new(n);
  gradient(res.x, g);

  // Inverse Hessian approximation, identity start.
  std::vector<double> H(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) H[static_cast<std::size_t>(i) * n + i] = 1.0;

  auto inf_norm = [&](const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  };

  int stalled = 0;
  for (int iter = 0; iter < max_iters; ++iter) {
    if (inf_norm(g) < grad_tol) {
      res.converged = true;
      res.iterations = iter;
      return res;
    }

    // direction = -H g
    std::vector<double> dir(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc -= H[static_cast<std::size_t>(i) * n + j] * g[j];
      dir[i] = acc;
    }
    double dg = 0.0;
    for (int i = 0; i < n; ++i) dg += dir[i] * g[i];
    if (dg >= 0) {  // not a descent direction; reset to steepest descent
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          H[static_cast<std::size_t>(i) * n + j] = i == j ? 1.0 : 0.0;
        }
        dir[i] = -g[i];
      }
      dg = 0.0;
      for (int i = 0; i < n; ++i) dg += dir[i] * g[i];
      if (dg >= 0) {  // zero gradient
        res.converged = true;
        res.iterations = iter;
        return res;
      }
    }

    // Armijo backtracking
    double step = 1.0;
    const double c1 = 1e-4;
    std::vector<double> x_new(n);
    double f_new = res.fx;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      for (int i = 0; i < n; ++i) x_new[i] = res.x[i] + step * dir[i];
      f_new = f(x_new);
      if (f_new <= res.fx + c1 * step * dg) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No decrease along this direction at machine-scale steps: treat the
      // current point as the optimum (gradient is finite-difference noise).
      res.converged = true;
      res.iterations = iter;
      return res;
    }

    gradient(x_new, g_new);

    // BFGS inverse-Hessian update
    std::vector<double> s(n), yv(n);
    double sy = 0.0;
    for (int i = 0; i < n; ++i) {
      s[i] = x_new[i] - res.x[i];
      yv[i] = g_new[i] - g[i];
      sy += s[i] * yv[i];
    }
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      // H = (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      std::vector<double> Hy(n, 0.0);
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += H[static_cast<std::size_t>(i) * n + j] * yv[j];
        Hy[i] = acc;
      }
      double yHy = 0.0;
      for (int i = 0; i < n; ++i) yHy += yv[i] * Hy[i];
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          H[static_cast<std::size_t>(i) * n + j] +=
              (1.0 + rho * yHy) * rho * s[i] * s[j] -
              rho * (s[i] * Hy[j] + Hy[i] * s[j]);
        }
      }
    }

    const double improvement = res.fx - f_new;
    res.x = x_new;
    res.fx = f_new;
    res.objective_trace.push_back(res.fx);
    g = g_new;
    res.iterations = iter + 1;

    // Objective plateau: accepted steps no longer move the value.
    stalled = improvement <= 1e-10 * (1.0 + std::abs(f_new)) ? stalled + 1 : 0;
    if (stalled >= 3) {
      res.converged = true;
      return res;
    }
  }
  res.converged = inf_norm(g) < grad_tol;
  return res;
}

}  // namespace ridebench::detail
