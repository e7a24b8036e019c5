#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "gpman/mesh.hpp"

namespace gpman {

// Lowest J eigenpairs of L f = lambda M f, mass-orthonormal
// (f_i^T M f_j = delta_ij), eigenvalues ascending, signs fixed so each
// eigenvector's largest-magnitude entry is positive.
struct Spectrum {
    Eigen::VectorXd eigenvalues;   // J, nonnegative, ascending
    Eigen::MatrixXd eigenvectors;  // n x J, column j samples f_j at vertices
    double total_mass = 0.0;

    int count() const { return static_cast<int>(eigenvalues.size()); }
    int vertex_count() const { return static_cast<int>(eigenvectors.rows()); }
};

struct EigOptions {
    // Dense path for n <= dense_cutoff, Lanczos with full reorthogonalization
    // above. force_lanczos exists so tests can cross-check the two paths.
    int dense_cutoff = 4096;
    bool force_lanczos = false;
    double residual_tol = 1e-10;   // whitened-space Ritz residual, relative to the spectral radius
    int max_iter_factor = 20;      // Lanczos cap = max_iter_factor * J
    int check_every = 32;          // convergence-check period
};

Spectrum solve_eigs(const DiscreteManifold& m, int J, const EigOptions& opts = {});

struct WeylFit {
    double slope = 0.0;     // fitted exponent of lambda_j ~ c * j^slope
    double constant = 0.0;  // fitted c
};

// Least-squares fit of log lambda_j vs log j over the upper half of the
// spectrum excluding the top 10% (discretization-polluted). Expect 2/d.
WeylFit weyl_check(const Spectrum& s);

// Binary spectrum cache keyed by a content hash of (vertices, cells, J).
// Little-endian 64-bit floats, self-describing header.
std::uint64_t spectrum_content_hash(const DiscreteManifold& m, int J);
void save_spectrum_cache(const std::string& path, const Spectrum& s, std::uint64_t content_hash);
// Returns false if the file is absent; throws io_error on a corrupt or
// mismatched (hash/shape) file.
bool load_spectrum_cache(const std::string& path, std::uint64_t expected_hash, Spectrum& out);

} // namespace gpman
