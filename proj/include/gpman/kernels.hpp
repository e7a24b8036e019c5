#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>

#include "gpman/exec.hpp"
#include "gpman/spectral.hpp"

namespace gpman {

enum class KernelFamily { intrinsic, extrinsic };

struct KernelSpec {
    KernelFamily family = KernelFamily::intrinsic;
    double nu = 2.5;        // smoothness
    double kappa = 1.0;     // length scale
    double sigma_f2 = 1.0;  // amplitude
    int truncation = 0;     // J (intrinsic only)
    int dim = 0;            // manifold dimension d (intrinsic exponent/normalization)
};

// Spectral filter of the truncated Karhunen-Loeve kernel:
//   w_j = (2 nu / kappa^2 + lambda_j)^{-(nu + d/2)},  j < J
//   C   = (1/|M|) sum_j w_j
// so that the mass-weighted average of k(x,x) = (sigma_f^2/C) sum w_j f_j^2
// equals sigma_f^2.
struct SpectralWeights {
    Eigen::VectorXd weights;
    double normalizer = 0.0;
};

SpectralWeights intrinsic_weights(const KernelSpec& spec, const Spectrum& spectrum);

// Euclidean Matern kernel value at distance r; r below 1e-13*kappa returns
// sigma_f^2 exactly (the Bessel form is 0*inf at r=0).
double matern(double r, double nu, double kappa, double sigma_f2);

// A kernel bound to its evaluation context: spectrum for the intrinsic
// family, ambient vertex coordinates for the extrinsic one. Pointers are
// non-owning; the caller keeps the context alive.
class KernelModel {
public:
    static KernelModel intrinsic(const KernelSpec& spec, const Spectrum& spectrum);
    static KernelModel extrinsic(const KernelSpec& spec, const Eigen::MatrixXd& coords);

    const KernelSpec& spec() const { return spec_; }
    const Spectrum* spectrum() const { return spectrum_; }
    const SpectralWeights& weights() const { return weights_; }

    double at(int a, int b) const;
    Eigen::VectorXd diag(std::span<const int> idx) const;
    Eigen::MatrixXd gram(std::span<const int> rows, std::span<const int> cols,
                         Exec exec = Exec::parallel) const;

    // Replace the length scale (used by the length-scale fit).
    KernelModel with_kappa(double kappa) const;

private:
    KernelSpec spec_;
    const Spectrum* spectrum_ = nullptr;
    SpectralWeights weights_;                  // intrinsic only
    const Eigen::MatrixXd* coords_ = nullptr;  // extrinsic only
};

// Karhunen-Loeve prior sample at the vertices:
//   f = sum_j sqrt(sigma_f^2 w_j / C) xi_j f_j,  xi_j ~ N(0,1),
// deterministic per seed and thread count.
Eigen::VectorXd sample_prior(const KernelSpec& spec, const Spectrum& spectrum,
                             std::uint64_t seed, Exec exec = Exec::parallel);

} // namespace gpman
