#include "gpman/kernels.hpp"

#include <cmath>

#include "gpman/rng.hpp"
#include "gpman/special.hpp"
#include "gpman/types.hpp"

namespace gpman {

SpectralWeights intrinsic_weights(const KernelSpec& spec, const Spectrum& spectrum) {
    if (spec.family != KernelFamily::intrinsic)
        throw config_error("intrinsic_weights: spec must be intrinsic");
    const int J = spec.truncation;
    if (J < 1 || J > spectrum.count())
        throw config_error("intrinsic_weights: truncation J=" + std::to_string(J) +
                           " exceeds spectrum size " + std::to_string(spectrum.count()));
    if (!(spec.nu > 0.0 && spec.kappa > 0.0 && spec.sigma_f2 > 0.0))
        throw config_error("intrinsic_weights: nu, kappa, sigma_f2 must be positive");
    if (spec.dim != 1 && spec.dim != 2)
        throw config_error("intrinsic_weights: manifold dimension must be 1 or 2");

    SpectralWeights w;
    w.weights.resize(J);
    const double shift = 2.0 * spec.nu / (spec.kappa * spec.kappa);
    const double expo = spec.nu + 0.5 * spec.dim;
    for (int j = 0; j < J; ++j)
        w.weights[j] = std::pow(shift + spectrum.eigenvalues[j], -expo);
    w.normalizer = w.weights.sum() / spectrum.total_mass;
    return w;
}

double matern(double r, double nu, double kappa, double sigma_f2) {
    if (!(r >= 0.0)) throw numerical_error("matern: negative distance");
    if (r < 1e-13 * kappa) return sigma_f2;
    const double z = std::sqrt(2.0 * nu) * r / kappa;
    // scaled Bessel keeps the far tail accurate until the whole product underflows
    const double log_pref = (1.0 - nu) * std::log(2.0) - sf::log_gamma(nu) + nu * std::log(z);
    return sigma_f2 * std::exp(log_pref - z) * sf::bessel_k_scaled(nu, z);
}

KernelModel KernelModel::intrinsic(const KernelSpec& spec, const Spectrum& spectrum) {
    KernelModel m;
    m.spec_ = spec;
    m.spec_.family = KernelFamily::intrinsic;
    m.spectrum_ = &spectrum;
    m.weights_ = intrinsic_weights(m.spec_, spectrum);
    return m;
}

KernelModel KernelModel::extrinsic(const KernelSpec& spec, const Eigen::MatrixXd& coords) {
    if (!(spec.nu > 0.0 && spec.kappa > 0.0 && spec.sigma_f2 > 0.0))
        throw config_error("extrinsic kernel: nu, kappa, sigma_f2 must be positive");
    KernelModel m;
    m.spec_ = spec;
    m.spec_.family = KernelFamily::extrinsic;
    m.coords_ = &coords;
    return m;
}

KernelModel KernelModel::with_kappa(double kappa) const {
    KernelSpec s = spec_;
    s.kappa = kappa;
    if (spec_.family == KernelFamily::intrinsic) return intrinsic(s, *spectrum_);
    return extrinsic(s, *coords_);
}

double KernelModel::at(int a, int b) const {
    if (spec_.family == KernelFamily::intrinsic) {
        const int J = spec_.truncation;
        const double* fa = spectrum_->eigenvectors.data();
        const int n = spectrum_->vertex_count();
        double acc = 0.0;
        for (int j = 0; j < J; ++j)
            acc += weights_.weights[j] * fa[j * n + a] * fa[j * n + b];
        return spec_.sigma_f2 / weights_.normalizer * acc;
    }
    const double r = (coords_->row(a) - coords_->row(b)).norm();
    return matern(r, spec_.nu, spec_.kappa, spec_.sigma_f2);
}

Eigen::VectorXd KernelModel::diag(std::span<const int> idx) const {
    Eigen::VectorXd d(static_cast<int>(idx.size()));
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) d[i] = at(idx[i], idx[i]);
    return d;
}

Eigen::MatrixXd KernelModel::gram(std::span<const int> rows, std::span<const int> cols,
                                  Exec exec) const {
    const int nr = static_cast<int>(rows.size());
    const int nc = static_cast<int>(cols.size());
    Eigen::MatrixXd out(nr, nc);
    const std::int64_t total = static_cast<std::int64_t>(nr) * nc;
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t e = 0; e < total; ++e)
            out(static_cast<int>(e % nr), static_cast<int>(e / nr)) =
                at(rows[e % nr], cols[e / nr]);
    } else {
        for (std::int64_t e = 0; e < total; ++e)
            out(static_cast<int>(e % nr), static_cast<int>(e / nr)) =
                at(rows[e % nr], cols[e / nr]);
    }
    return out;
}

Eigen::VectorXd sample_prior(const KernelSpec& spec, const Spectrum& spectrum, std::uint64_t seed,
                             Exec exec) {
    if (spec.family != KernelFamily::intrinsic)
        throw config_error("sample_prior: only the intrinsic family has a KL expansion");
    const SpectralWeights w = intrinsic_weights(spec, spectrum);
    const int J = spec.truncation;
    const int n = spectrum.vertex_count();

    Rng rng(seed);
    Eigen::VectorXd coeff(J);
    for (int j = 0; j < J; ++j)
        coeff[j] = std::sqrt(spec.sigma_f2 * w.weights[j] / w.normalizer) * rng.normal();

    Eigen::VectorXd field(n);
    const double* f = spectrum.eigenvectors.data();
    auto eval_row = [&](int i) {
        double acc = 0.0;
        for (int j = 0; j < J; ++j) acc += coeff[j] * f[j * n + i];
        field[i] = acc;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) eval_row(i);
    } else {
        for (int i = 0; i < n; ++i) eval_row(i);
    }
    return field;
}

} // namespace gpman
