#include "oprelay/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "oprelay/errors.hpp"

namespace oprelay {
namespace {

constexpr double kSeriesLimit = 2.0;
constexpr double kEps = 1e-17;

void require_positive(double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: x must be > 0");
}

// Ascending series, valid for small x:
//   K0 = -(ln(x/2) + gamma) I0(x) + sum_{k>=1} H_k q^k / (k!)^2
//   K1 = 1/x + ln(x/2) I1(x)
//        - (x/4) sum_{k>=0} [psi(k+1) + psi(k+2)] q^k / (k! (k+1)!)
// with q = x^2/4, H_k the harmonic numbers and psi(n+1) = H_n - gamma.
std::pair<double, double> series_k01(double x) {
  const double q = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);
  const double gamma = std::numbers::egamma;

  double i0 = 1.0, i1 = 0.0;
  double k0_sum = 0.0, k1_sum = 0.0;
  double term0 = 1.0;  // q^k / (k!)^2
  double term1 = 1.0;  // q^k / (k! (k+1)!)
  double harmonic = 0.0;
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      term0 *= q / (static_cast<double>(k) * k);
      term1 *= q / (static_cast<double>(k) * (k + 1));
      harmonic += 1.0 / k;
    }
    const double harmonic_next = harmonic + 1.0 / (k + 1);
    i0 += (k > 0) ? term0 : 0.0;
    i1 += term1;
    k0_sum += harmonic * term0;
    k1_sum += (harmonic + harmonic_next - 2.0 * gamma) * term1;
    if (k > 0 && term0 < kEps * i0 && term1 < kEps * i1) break;
  }
  i1 *= 0.5 * x;

  const double k0 = -(log_half + gamma) * i0 + k0_sum;
  const double k1 = 1.0 / x + log_half * i1 - 0.25 * x * k1_sum;
  return {k0, k1};
}

// Steed's continued fraction (Temme's CF2) for order 0, returning
// (e^x K0(x), e^x K1(x)).
std::pair<double, double> continued_fraction_k01_scaled(double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < kEps) break;
  }
  h *= a1;
  const double k0 = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k1 = k0 * (x + 0.5 - h) / x;
  return {k0, k1};
}

}  // namespace

double bessel_k0(double x) {
  require_positive(x);
  if (x <= kSeriesLimit) return series_k01(x).first;
  return continued_fraction_k01_scaled(x).first * std::exp(-x);
}

double bessel_k1(double x) {
  require_positive(x);
  if (x <= kSeriesLimit) return series_k01(x).second;
  return continued_fraction_k01_scaled(x).second * std::exp(-x);
}

double bessel_k0_scaled(double x) {
  require_positive(x);
  if (x <= kSeriesLimit) return series_k01(x).first * std::exp(x);
  return continued_fraction_k01_scaled(x).first;
}

double bessel_k1_scaled(double x) {
  require_positive(x);
  if (x <= kSeriesLimit) return series_k01(x).second * std::exp(x);
  return continued_fraction_k01_scaled(x).second;
}

double bessel_k(int order, double x) {
  if (order == 0) return bessel_k0(x);
  if (order == 1) return bessel_k1(x);
  throw DomainError("bessel_k: only orders 0 and 1 are implemented");
}

}  // namespace oprelay
