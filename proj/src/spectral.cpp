#include "gpman/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gpman/rng.hpp"
#include "gpman/types.hpp"

namespace gpman {

namespace {

Eigen::SparseMatrix<double> whitened_operator(const DiscreteManifold& m) {
    const int n = m.vertex_count();
    Eigen::VectorXd inv_sqrt_mass(n);
    for (int i = 0; i < n; ++i) {
        if (!(m.mass[i] > 0.0))
            throw numerical_error("solve_eigs: nonpositive lumped mass at vertex " +
                                  std::to_string(i));
        inv_sqrt_mass[i] = 1.0 / std::sqrt(m.mass[i]);
    }
    Eigen::SparseMatrix<double> a = m.stiffness;
    for (int k = 0; k < a.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
            it.valueRef() *= inv_sqrt_mass[it.row()] * inv_sqrt_mass[it.col()];
    return a;
}

// Sign convention: the entry of largest magnitude is positive, ties broken by
// the lowest index.
void fix_signs(Eigen::MatrixXd& f) {
    for (int j = 0; j < f.cols(); ++j) {
        int arg = 0;
        double best = std::abs(f(0, j));
        for (int i = 1; i < f.rows(); ++i) {
            const double a = std::abs(f(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (f(arg, j) < 0.0) f.col(j) = -f.col(j);
    }
}

// Lowest J eigenpairs of the symmetric tridiagonal (diag, offdiag) via LAPACK.
void tridiag_lowest(const std::vector<double>& diag, const std::vector<double>& offdiag, int J,
                    Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
    const int m = static_cast<int>(diag.size());
    std::vector<double> d = diag, e = offdiag;
    e.resize(m, 0.0);
    values.resize(J);
    vectors.resize(m, J);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max(1, J)));
    lapack_int found = 0;
    const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', m, d.data(), e.data(), 0.0,
                                           0.0, 1, J, 0.0, &found, values.data(), vectors.data(),
                                           m, isuppz.data());
    if (info != 0 || found != J)
        throw numerical_error("solve_eigs: tridiagonal eigensolve failed (info=" +
                              std::to_string(info) + ")");
}

struct WhitenedPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // orthonormal in the Euclidean sense
};

WhitenedPairs solve_dense(const Eigen::SparseMatrix<double>& a, int J) {
    const int n = static_cast<int>(a.rows());
    Eigen::MatrixXd dense = Eigen::MatrixXd(a);
    WhitenedPairs out;
    out.values.resize(J);
    out.vectors.resize(n, J);
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(J));
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, dense.data(), n, 0.0, 0.0, 1, J, 0.0,
                       &found, out.values.data(), out.vectors.data(), n, isuppz.data());
    if (info != 0 || found != J)
        throw numerical_error("solve_eigs: dense eigensolve failed (info=" + std::to_string(info) +
                              ")");
    return out;
}

WhitenedPairs solve_lanczos(const Eigen::SparseMatrix<double>& a, int J, const EigOptions& opts) {
    const int n = static_cast<int>(a.rows());
    const int cap = std::min(n, opts.max_iter_factor * J);

    // spectral-radius estimate for tolerance scaling (Gershgorin)
    double radius = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        double row = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it)
            row += std::abs(it.value());
        radius = std::max(radius, row);
    }
    const double tol = opts.residual_tol * std::max(radius, 1e-300);

    Eigen::MatrixXd basis;  // grown in chunks, columns are the Lanczos vectors
    int allocated = 0;
    auto ensure_cols = [&](int want) {
        if (want <= allocated) return;
        const int grow = std::max(want, allocated + 256);
        basis.conservativeResize(n, std::min(grow, cap));
        allocated = static_cast<int>(basis.cols());
    };

    std::vector<double> alpha, beta;
    alpha.reserve(cap);
    beta.reserve(cap);

    Rng rng(0x9e3779b97f4a7c15ULL);  // fixed start vector: deterministic output
    ensure_cols(1);
    for (int i = 0; i < n; ++i) basis(i, 0) = rng.uniform01() - 0.5;
    basis.col(0).normalize();

    Eigen::VectorXd w(n), coeff;
    Eigen::VectorXd ritz_values;
    Eigen::MatrixXd ritz_vectors;
    double worst_residual = -1.0;

    for (int k = 0; k < cap; ++k) {
        w.noalias() = a * basis.col(k);
        if (k > 0) w.noalias() -= beta[k - 1] * basis.col(k - 1);
        const double ak = basis.col(k).dot(w);
        alpha.push_back(ak);
        w.noalias() -= ak * basis.col(k);
        // full reorthogonalization, two classical Gram-Schmidt passes
        for (int pass = 0; pass < 2; ++pass) {
            coeff.noalias() = basis.leftCols(k + 1).transpose() * w;
            w.noalias() -= basis.leftCols(k + 1) * coeff;
        }
        double bk = w.norm();
        if (bk <= 1e-14 * std::max(radius, 1.0)) {
            // invariant subspace found; continue in a fresh random direction
            for (int i = 0; i < n; ++i) w[i] = rng.uniform01() - 0.5;
            for (int pass = 0; pass < 2; ++pass) {
                coeff.noalias() = basis.leftCols(k + 1).transpose() * w;
                w.noalias() -= basis.leftCols(k + 1) * coeff;
            }
            bk = w.norm();
            if (bk <= 0.0) throw numerical_error("solve_eigs: Lanczos breakdown");
            beta.push_back(0.0);
            w /= bk;
        } else {
            beta.push_back(bk);
            w /= bk;
        }
        const int m = k + 1;
        if (m < cap) {
            ensure_cols(m + 1);
            basis.col(m) = w;
        }

        const bool last = (m == cap);
        if (m >= J && (m % opts.check_every == 0 || last)) {
            std::vector<double> off(beta.begin(), beta.end() - 1);
            tridiag_lowest(alpha, off, J, ritz_values, ritz_vectors);
            worst_residual = 0.0;
            for (int j = 0; j < J; ++j)
                worst_residual =
                    std::max(worst_residual, std::abs(beta[m - 1] * ritz_vectors(m - 1, j)));
            if (worst_residual <= tol || last) {
                if (last && worst_residual > tol)
                    throw numerical_error(
                        "solve_eigs: Lanczos failed to converge within " + std::to_string(cap) +
                        " iterations; worst residual " + std::to_string(worst_residual) +
                        " vs tolerance " + std::to_string(tol));
                WhitenedPairs out;
                out.values = ritz_values;
                out.vectors.noalias() = basis.leftCols(m) * ritz_vectors;
                return out;
            }
        }
    }
    throw numerical_error("solve_eigs: Lanczos failed to converge");
}

void verify_residuals(const DiscreteManifold& m, const Spectrum& s) {
    const double stiffness_inf_norm = [&] {
        double v = 0.0;
        for (int k = 0; k < m.stiffness.outerSize(); ++k) {
            double row = 0.0;
            for (Eigen::SparseMatrix<double>::InnerIterator it(m.stiffness, k); it; ++it)
                row += std::abs(it.value());
            v = std::max(v, row);
        }
        return std::max(v, 1e-300);
    }();
    for (int j = 0; j < s.count(); ++j) {
        const Eigen::VectorXd f = s.eigenvectors.col(j);
        const double r = (m.stiffness * f - s.eigenvalues[j] * m.mass.cwiseProduct(f)).norm() /
                         (stiffness_inf_norm * f.norm());
        if (!(r <= 1e-8))
            throw numerical_error("solve_eigs: eigenpair " + std::to_string(j) +
                                  " residual " + std::to_string(r) + " exceeds 1e-8");
    }
}

} // namespace

Spectrum solve_eigs(const DiscreteManifold& m, int J, const EigOptions& opts) {
    const int n = m.vertex_count();
    if (J < 1 || J > n) throw config_error("solve_eigs: need 1 <= J <= vertex count");

    const Eigen::SparseMatrix<double> a = whitened_operator(m);
    WhitenedPairs pairs = (n <= opts.dense_cutoff && !opts.force_lanczos)
                              ? solve_dense(a, J)
                              : solve_lanczos(a, J, opts);

    // negatives beyond roundoff signal a broken assembly
    const double scale = std::max(std::abs(pairs.values[J - 1]), 1.0);
    for (int j = 0; j < J; ++j) {
        if (pairs.values[j] < -1e-10 * scale)
            throw numerical_error("solve_eigs: negative eigenvalue " +
                                  std::to_string(pairs.values[j]));
        pairs.values[j] = std::max(pairs.values[j], 0.0);
    }

    Spectrum s;
    s.eigenvalues = pairs.values;
    s.total_mass = m.total_mass();
    s.eigenvectors.resize(n, J);
    const Eigen::VectorXd inv_sqrt_mass = m.mass.cwiseSqrt().cwiseInverse();
    for (int j = 0; j < J; ++j)
        s.eigenvectors.col(j) = pairs.vectors.col(j).cwiseProduct(inv_sqrt_mass);
    fix_signs(s.eigenvectors);
    verify_residuals(m, s);
    return s;
}

WeylFit weyl_check(const Spectrum& s) {
    const int J = s.count();
    if (J < 32) throw config_error("weyl_check: need J >= 32");
    const int lo = J / 2;
    const int hi = static_cast<int>(0.9 * J);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int j = lo; j < hi; ++j) {
        const double x = std::log(static_cast<double>(j));
        const double y = std::log(std::max(s.eigenvalues[j], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    WeylFit fit;
    fit.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    fit.constant = std::exp((sy - fit.slope * sx) / cnt);
    return fit;
}

namespace {

constexpr char kCacheMagic[8] = {'G', 'P', 'M', 'S', 'P', 'E', 'C', '1'};
constexpr std::uint32_t kCacheVersion = 1;

std::uint64_t fnv1a_bytes(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::uint64_t spectrum_content_hash(const DiscreteManifold& m, int J) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const std::int64_t meta[3] = {m.dim, m.ambient_dim, J};
    h = fnv1a_bytes(h, meta, sizeof(meta));
    h = fnv1a_bytes(h, m.vertices.data(), sizeof(double) * m.vertices.size());
    if (!m.cycle.empty()) h = fnv1a_bytes(h, m.cycle.data(), sizeof(int) * m.cycle.size());
    if (!m.triangles.empty())
        h = fnv1a_bytes(h, m.triangles.data(), sizeof(std::array<int, 3>) * m.triangles.size());
    return h;
}

void save_spectrum_cache(const std::string& path, const Spectrum& s, std::uint64_t content_hash) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw io_error("spectrum cache: cannot write " + tmp);
        const std::uint64_t n = s.vertex_count(), J = s.count();
        out.write(kCacheMagic, sizeof(kCacheMagic));
        out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof(kCacheVersion));
        const std::uint32_t reserved = 0;
        out.write(reinterpret_cast<const char*>(&reserved), sizeof(reserved));
        out.write(reinterpret_cast<const char*>(&n), sizeof(n));
        out.write(reinterpret_cast<const char*>(&J), sizeof(J));
        out.write(reinterpret_cast<const char*>(&content_hash), sizeof(content_hash));
        out.write(reinterpret_cast<const char*>(&s.total_mass), sizeof(double));
        out.write(reinterpret_cast<const char*>(s.eigenvalues.data()),
                  sizeof(double) * static_cast<std::streamsize>(J));
        out.write(reinterpret_cast<const char*>(s.eigenvectors.data()),
                  sizeof(double) * static_cast<std::streamsize>(n * J));
        if (!out) throw io_error("spectrum cache: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

bool load_spectrum_cache(const std::string& path, std::uint64_t expected_hash, Spectrum& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[8];
    std::uint32_t version = 0, reserved = 0;
    std::uint64_t n = 0, J = 0, hash = 0;
    in.read(magic, sizeof(magic));
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    in.read(reinterpret_cast<char*>(&reserved), sizeof(reserved));
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    in.read(reinterpret_cast<char*>(&J), sizeof(J));
    in.read(reinterpret_cast<char*>(&hash), sizeof(hash));
    if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0 || version != kCacheVersion)
        throw io_error("spectrum cache: corrupt or unsupported file " + path);
    if (hash != expected_hash)
        throw io_error("spectrum cache: content hash mismatch for " + path);
    out.eigenvalues.resize(static_cast<int>(J));
    out.eigenvectors.resize(static_cast<int>(n), static_cast<int>(J));
    in.read(reinterpret_cast<char*>(&out.total_mass), sizeof(double));
    in.read(reinterpret_cast<char*>(out.eigenvalues.data()),
            sizeof(double) * static_cast<std::streamsize>(J));
    in.read(reinterpret_cast<char*>(out.eigenvectors.data()),
            sizeof(double) * static_cast<std::streamsize>(n * J));
    if (!in) throw io_error("spectrum cache: truncated file " + path);
    return true;
}

} // namespace gpman
