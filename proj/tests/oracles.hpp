// Independent oracles used by the tests. These deliberately avoid the library
// implementation paths they check: quadrature for Bessel K, closed forms for
// half-integer orders and Matern kernels, and synthetic spectra built from
// trigonometric identities.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gpman/spectral.hpp"

namespace oracles {

// log(cosh(u)) without overflow
inline double log_cosh(double u) {
    const double a = std::abs(u);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt, evaluated with the
// trapezoid rule on the even extension (spectrally accurate) under step
// halving until the value stabilizes.
inline double bessel_k_quadrature(double nu, double x, double tol = 5e-14) {
    auto integrand = [&](double t) {
        const double log_g = -x * std::cosh(t) + log_cosh(nu * t);
        return log_g < -745.0 ? 0.0 : std::exp(log_g);
    };
    // truncation point: exponent safely below underflow
    double upper = 1.0;
    while (-x * std::cosh(upper) + std::abs(nu) * upper > -760.0) upper += 0.5;

    double h = 0.25;
    auto sum_at = [&](double step) {
        double s = 0.5 * integrand(0.0);
        for (double t = step; t <= upper; t += step) s += integrand(t);
        return s * step;
    };
    double prev = sum_at(h);
    for (int it = 0; it < 8; ++it) {
        h *= 0.5;
        const double cur = sum_at(h);
        if (std::abs(cur - prev) <= tol * std::abs(cur)) return cur;
        prev = cur;
    }
    return prev;
}

// K_{1/2}, K_{3/2}, K_{5/2} closed forms
inline double bessel_k_half_integer(int twice_nu, double x) {
    const double base = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
    switch (twice_nu) {
        case 1: return base;
        case 3: return base * (1.0 + 1.0 / x);
        case 5: return base * (1.0 + 3.0 / x + 3.0 / (x * x));
        default: throw std::invalid_argument("bessel_k_half_integer: unsupported order");
    }
}

// Matern closed forms at nu = 1/2, 3/2, 5/2
inline double matern_half_integer(int twice_nu, double r, double kappa, double sigma_f2) {
    switch (twice_nu) {
        case 1: return sigma_f2 * std::exp(-r / kappa);
        case 3: {
            const double z = std::sqrt(3.0) * r / kappa;
            return sigma_f2 * (1.0 + z) * std::exp(-z);
        }
        case 5: {
            const double z = std::sqrt(5.0) * r / kappa;
            return sigma_f2 * (1.0 + z + z * z / 3.0) * std::exp(-z);
        }
        default: throw std::invalid_argument("matern_half_integer: unsupported order");
    }
}

// Exact unit-circle spectrum sampled at n uniform vertices: lambda = 0, then
// k^2 twice for k = 1, 2, ...; eigenvectors cos/sin(k theta)/sqrt(pi),
// mass-orthonormal for the uniform weight 2 pi / n. Valid while the largest
// k stays below n/2.
inline gpman::Spectrum circle_spectrum(int n, int J) {
    if (J > n / 2) throw std::invalid_argument("circle_spectrum: J too large for n");
    gpman::Spectrum s;
    s.total_mass = 2.0 * std::numbers::pi;
    s.eigenvalues.resize(J);
    s.eigenvectors.resize(n, J);
    const double norm = 1.0 / std::sqrt(std::numbers::pi);
    for (int j = 0; j < J; ++j) {
        const int k = (j + 1) / 2;
        s.eigenvalues[j] = static_cast<double>(k) * k;
        for (int i = 0; i < n; ++i) {
            const double th = 2.0 * std::numbers::pi * i / n;
            if (j == 0)
                s.eigenvectors(i, j) = 1.0 / std::sqrt(2.0 * std::numbers::pi);
            else if (j % 2 == 1)
                s.eigenvectors(i, j) = norm * std::cos(k * th);
            else
                s.eigenvectors(i, j) = norm * std::sin(k * th);
        }
    }
    return s;
}

// least-squares slope of y against x
inline double fit_slope(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double n = static_cast<double>(x.size());
    const double sx = x.sum(), sy = y.sum();
    return (n * x.dot(y) - sx * sy) / (n * x.squaredNorm() - sx * sx);
}

} // namespace oracles
