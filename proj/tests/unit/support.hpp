#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oprelay::testing {

/// sup |F_n - F| for a sample (sorted in place).
inline double ks_distance(std::vector<double>& xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, std::fabs(f - static_cast<double>(i) / n),
                  std::fabs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov statistic (both samples sorted in place).
inline double ks_two_sample(std::vector<double>& a, std::vector<double>& b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

/// e^x K_nu(x) from the integral representation
///   K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt,
/// by the trapezoid rule, which converges geometrically for this integrand.
/// Shares nothing with the library's series / continued-fraction code.
inline double bessel_k_scaled_oracle(int nu, double x) {
  const double h = 1.0 / 128.0;
  double sum = 0.5;  // t = 0 term: exp(0) * cosh(0), half weight
  for (int k = 1;; ++k) {
    const double t = k * h;
    const double s = std::sinh(0.5 * t);
    const double term = std::exp(-2.0 * x * s * s) * std::cosh(nu * t);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum * h;
}

inline double bessel_k_oracle(int nu, double x) {
  return bessel_k_scaled_oracle(nu, x) * std::exp(-x);
}

/// |observed - expected| within k standard errors.
inline bool within_sigma(double observed, double expected, double std_error, double k = 3.0) {
  return std::fabs(observed - expected) <= k * std_error;
}

}  // namespace oprelay::testing
