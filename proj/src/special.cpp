#include "gpman/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "gpman/types.hpp"

namespace gpman::sf {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxIter = 10000;
constexpr double kNuMax = 50.0;

// Taylor coefficients of 1/Gamma(1+t) = sum b_m t^m for |t| <= 1/2
// (Abramowitz & Stegun 6.1.34 shifted by Gamma(1+t) = t Gamma(t)).
constexpr double kInvGamma1p[] = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

// gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu), gam2 the even part,
// gampl = 1/Gamma(1+mu), gammi = 1/Gamma(1-mu). Evaluated from the Taylor
// series so the mu -> 0 limit is exact (no cancellation near integer orders).
void temme_gammas(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
    const double mu2 = mu * mu;
    // even = b_0 + b_2 mu^2 + ...; odd = b_1 + b_3 mu^2 + ...
    double odd = 0.0, even = 0.0;
    double pw = 1.0;
    for (std::size_t m = 0; m + 1 < std::size(kInvGamma1p); m += 2) {
        even += kInvGamma1p[m] * pw;
        odd += kInvGamma1p[m + 1] * pw;
        pw *= mu2;
    }
    gam2 = even;
    gam1 = -odd;
    gampl = even + mu * odd;   // G(mu)  = even + mu*odd with G odd part = mu*odd
    gammi = even - mu * odd;   // G(-mu)
}

// Temme's series for K_mu(x), K_{mu+1}(x), valid for x <= 2, |mu| <= 1/2.
void bessel_k_temme(double x, double mu, double& kmu, double& kmu1) {
    const double pimu = std::numbers::pi * mu;
    const double fact = (std::abs(pimu) < 1e-15) ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(0.5 * x);
    double e = mu * d;
    const double fact2 = (std::abs(e) < 1e-15) ? 1.0 : std::sinh(e) / e;
    double gam1, gam2, gampl, gammi;
    temme_gammas(mu, gam1, gam2, gampl, gammi);
    double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / gampl;
    double q = 0.5 / (e * gammi);
    double c = 1.0;
    d = 0.25 * x * x;
    double sum1 = p;
    for (int i = 1; i <= kMaxIter; ++i) {
        ff = (i * ff + p + q) / (i * i - mu * mu);
        c *= d / i;
        p /= (i - mu);
        q /= (i + mu);
        const double del = c * ff;
        sum += del;
        sum1 += c * (p - i * ff);
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    kmu = sum;
    kmu1 = sum1 * (2.0 / x);
}

// Thompson-Barnett / Steed continued fraction for x > 2. Returns the scaled
// values e^x K_mu(x), e^x K_{mu+1}(x).
void bessel_k_cf2_scaled(double x, double mu, double& kmu, double& kmu1) {
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25 - mu * mu;
    double q = a1, c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    bool converged = false;
    for (int i = 2; i <= kMaxIter; ++i) {
        a -= 2 * (i - 1);
        c = -a * c / i;
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
        if (std::abs(dels / s) <= kEps) {
            converged = true;
            break;
        }
    }
    if (!converged) throw numerical_error("bessel_k: continued fraction failed to converge");
    h = a1 * h;
    kmu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
    kmu1 = kmu * (mu + x + 0.5 - h) / x;
}

// Core: e^x K_nu(x) for nu >= 0, x > 0.
double bessel_k_scaled_impl(double nu, double x) {
    const int nl = static_cast<int>(std::floor(nu + 0.5));
    const double mu = nu - nl;  // |mu| <= 1/2
    double kmu, kmu1;
    if (x <= 2.0) {
        bessel_k_temme(x, mu, kmu, kmu1);
        const double ex = std::exp(x);
        kmu *= ex;
        kmu1 *= ex;
    } else {
        bessel_k_cf2_scaled(x, mu, kmu, kmu1);
    }
    const double xi2 = 2.0 / x;
    for (int i = 1; i <= nl; ++i) {
        const double knext = (mu + i) * xi2 * kmu1 + kmu;
        kmu = kmu1;
        kmu1 = knext;
    }
    // after the recurrence kmu holds K_{mu+nl} = K_nu
    if (!std::isfinite(kmu))
        throw numerical_error("bessel_k: overflow (tiny x with large nu); use the scaled variant "
                              "or rescale inputs");
    return kmu;
}

void check_domain(double nu, double x) {
    if (!(x > 0.0)) throw numerical_error("bessel_k: requires x > 0");
    if (!(nu >= 0.0) || nu > kNuMax) throw numerical_error("bessel_k: requires 0 <= nu <= 50");
}

} // namespace

double bessel_k(double nu, double x) {
    check_domain(nu, x);
    return bessel_k_scaled_impl(nu, x) * std::exp(-x);
}

double bessel_k_scaled(double nu, double x) {
    check_domain(nu, x);
    return bessel_k_scaled_impl(nu, x);
}

double log_gamma(double z) {
    if (!(z > 0.0)) throw numerical_error("log_gamma: requires z > 0");
    return std::lgamma(z);
}

} // namespace gpman::sf
