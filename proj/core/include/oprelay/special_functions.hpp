#pragma once

namespace oprelay {

/// Modified Bessel functions of the second kind, orders 0 and 1.
///
/// x <= 2: ascending power series (converges to full double precision).
/// x > 2:  Steed/Temme continued fraction for the scaled pair
///         e^x K_0(x), e^x K_1(x).
/// Observed max relative error against an independent integral-representation
/// oracle is below 1e-14 on [1e-3, 50]. Throws DomainError for x <= 0.
double bessel_k0(double x);
double bessel_k1(double x);

/// e^x K_0(x) and e^x K_1(x); finite for large x where K underflows.
double bessel_k0_scaled(double x);
double bessel_k1_scaled(double x);

/// Dispatches on order; only 0 and 1 are supported (DomainError otherwise).
double bessel_k(int order, double x);

}  // namespace oprelay
