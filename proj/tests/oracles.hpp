#pragma once

// Test-only reference computations, deliberately independent of the code
// paths they check.

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace oracle {

/// Maximum of f over [lo, hi] sampled with the given step.
inline double grid_max(const std::function<double(double)>& f, double lo, double hi, double step) {
  double best = -std::numeric_limits<double>::infinity();
  const long n = static_cast<long>(std::floor((hi - lo) / step));
  for (long i = 0; i <= n; ++i) best = std::max(best, f(lo + step * static_cast<double>(i)));
  return std::max(best, f(hi));
}

/// Ternary search for the maximizer of a concave function on [lo, hi].
inline double concave_argmax(const std::function<double(double)>& f, double lo, double hi) {
  for (int it = 0; it < 300; ++it) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (f(a) < f(b)) lo = a; else hi = b;
  }
  return 0.5 * (lo + hi);
}

/// Principal square root of an SPD matrix by the Denman-Beavers iteration.
inline Eigen::MatrixXd denman_beavers_sqrt(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd y = a;
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  for (int it = 0; it < 100; ++it) {
    const Eigen::MatrixXd y_next = 0.5 * (y + z.inverse());
    const Eigen::MatrixXd z_next = 0.5 * (z + y.inverse());
    y = y_next;
    z = z_next;
  }
  return y;
}

/// Standard-S scalar product with no matrix involved.
inline double standard_product(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const long m = x.size() / 2;
  double s = 0.0;
  for (long i = 0; i < m; ++i) s += x(i) * y(m + i) + x(m + i) * y(i);
  return s;
}

}  // namespace oracle
