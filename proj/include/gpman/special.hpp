#pragma once

namespace gpman::sf {

// Modified Bessel function of the second kind, real order.
// Temme's series for x <= 2 (with the nu -> integer limit handled inside),
// Thompson-Barnett continued fraction for x > 2, forward recurrence in nu.
// Domain: x > 0, 0 <= nu <= 50. Throws io-free std exceptions via
// gpman::numerical_error for domain violations and overflow.
double bessel_k(double nu, double x);

// exp(x) * K_nu(x); avoids the e^{-x} underflow for large x.
double bessel_k_scaled(double nu, double x);

// log Gamma(z) for z > 0.
double log_gamma(double z);

} // namespace gpman::sf
