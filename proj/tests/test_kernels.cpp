#include <doctest.h>

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

#include "gpman/kernels.hpp"
#include "gpman/mesh.hpp"
#include "gpman/rng.hpp"
#include "gpman/types.hpp"
#include "oracles.hpp"

using namespace gpman;

namespace {

std::vector<int> iota_vec(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

KernelSpec intrinsic_spec(double nu, double kappa, double sf2, int J, int d) {
    KernelSpec s;
    s.family = KernelFamily::intrinsic;
    s.nu = nu;
    s.kappa = kappa;
    s.sigma_f2 = sf2;
    s.truncation = J;
    s.dim = d;
    return s;
}

} // namespace

TEST_CASE("intrinsic_weights: normalizer against direct summation on analytic eigenvalues") {
    const Spectrum s = oracles::circle_spectrum(512, 11);
    const KernelSpec spec = intrinsic_spec(2.5, 1.0, 1.0, 11, 1);
    const SpectralWeights w = intrinsic_weights(spec, s);

    double direct = 0.0;  // independent summation over the analytic circle spectrum
    const double analytic[11] = {0, 1, 1, 4, 4, 9, 9, 16, 16, 25, 25};
    for (double lam : analytic) direct += std::pow(2.0 * 2.5 / 1.0 + lam, -3.0);
    direct /= 2.0 * std::numbers::pi;
    CHECK(std::abs(w.normalizer - direct) / direct < 1e-12);
    for (int j = 1; j < 11; ++j) CHECK(w.weights[j] <= w.weights[j - 1]);
}

TEST_CASE("intrinsic_weights: flat spectrum degenerates to equal weights") {
    Spectrum s;
    s.total_mass = 3.0;
    s.eigenvalues = Eigen::VectorXd::Zero(7);
    s.eigenvectors = Eigen::MatrixXd::Identity(7, 7);
    const SpectralWeights w = intrinsic_weights(intrinsic_spec(1.5, 2.0, 1.0, 7, 1), s);
    for (int j = 0; j < 7; ++j) CHECK(w.weights[j] == doctest::Approx(w.weights[0]));
    CHECK(w.normalizer == doctest::Approx(7.0 * w.weights[0] / 3.0).epsilon(1e-14));
}

TEST_CASE("intrinsic_weights: longer length scale favors low modes") {
    const Spectrum s = oracles::circle_spectrum(64, 8);
    double prev_ratio = 0.0;
    for (double kappa : {0.5, 1.0, 2.0, 4.0}) {
        const SpectralWeights w = intrinsic_weights(intrinsic_spec(2.5, kappa, 1.0, 8, 1), s);
        const double ratio = w.weights[1] / w.weights[0];
        CHECK(ratio > prev_ratio);
        prev_ratio = ratio;
    }
}

TEST_CASE("intrinsic_weights: J beyond the spectrum is rejected") {
    const Spectrum s = oracles::circle_spectrum(64, 8);
    CHECK_THROWS_AS(intrinsic_weights(intrinsic_spec(2.5, 1.0, 1.0, 9, 1), s), config_error);
}

TEST_CASE("matern closed forms") {
    CHECK(std::abs(matern(1.0, 0.5, 1.0, 1.0) - std::exp(-1.0)) < 1e-12);
    const double want32 = (1.0 + std::sqrt(3.0)) * std::exp(-std::sqrt(3.0));
    CHECK(std::abs(matern(1.0, 1.5, 1.0, 1.0) - want32) < 1e-12);
    for (double r : {0.05, 0.3, 1.0, 2.5}) {
        for (int t : {1, 3, 5}) {
            const double got = matern(r, t / 2.0, 0.7, 1.9);
            CHECK(std::abs(got - oracles::matern_half_integer(t, r, 0.7, 1.9)) < 1e-10 * got);
        }
    }
    // r = 0 and the sub-threshold branch return sigma_f2 exactly
    CHECK(matern(0.0, 2.5, 1.0, 1.7) == 1.7);
    CHECK(matern(1e-14, 2.5, 1.0, 1.7) == 1.7);
}

TEST_CASE("intrinsic diagonal averages to sigma_f2 in the mass inner product") {
    for (const double sf2 : {1.0, 2.3}) {
        const DiscreteManifold mc = gen_circle(256, 1.0);
        const Spectrum sc = solve_eigs(mc, 24);
        const KernelModel kc =
            KernelModel::intrinsic(intrinsic_spec(2.5, 1.0, sf2, 24, 1), sc);
        const Eigen::VectorXd diag = kc.diag(iota_vec(256));
        CHECK(std::abs(mc.mass.dot(diag) / mc.total_mass() - sf2) < 1e-10);

        const DiscreteManifold ms = gen_icosphere(2, 1.0);
        const Spectrum ss = solve_eigs(ms, 40);
        const KernelModel ks =
            KernelModel::intrinsic(intrinsic_spec(2.5, 0.25, sf2, 40, 2), ss);
        const Eigen::VectorXd diag_s = ks.diag(iota_vec(ms.vertex_count()));
        CHECK(std::abs(ms.mass.dot(diag_s) / ms.total_mass() - sf2) < 1e-10);
    }
}

TEST_CASE("gram: symmetry, PSD on random subsets, intrinsic rank <= J") {
    const DiscreteManifold m = gen_icosphere(2, 1.0);
    const Spectrum s = solve_eigs(m, 24);
    const KernelModel ki = KernelModel::intrinsic(intrinsic_spec(2.5, 0.5, 1.0, 24, 2), s);
    KernelSpec espec;
    espec.family = KernelFamily::extrinsic;
    espec.nu = 3.5;
    espec.kappa = 0.6;
    espec.sigma_f2 = 1.0;
    const KernelModel ke = KernelModel::extrinsic(espec, m.vertices);

    Rng rng(7);
    for (const KernelModel* k : {&ki, &ke}) {
        const std::vector<int> sub = sample_without_replacement(50, m.vertex_count(), rng);
        const Eigen::MatrixXd g = k->gram(sub, sub);
        CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
        CHECK(es.eigenvalues().minCoeff() >= -1e-8 * k->spec().sigma_f2);
    }

    const Eigen::MatrixXd full = ki.gram(iota_vec(m.vertex_count()), iota_vec(m.vertex_count()));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(full);
    const auto& sv = svd.singularValues();
    for (int i = 24; i < sv.size(); ++i) CHECK(sv[i] < 1e-8 * sv[0]);
}

TEST_CASE("extrinsic gram invariant under rigid motion") {
    const DiscreteManifold m = gen_icosphere(1, 1.0);
    KernelSpec espec;
    espec.family = KernelFamily::extrinsic;
    espec.nu = 2.5;
    espec.kappa = 0.8;
    espec.sigma_f2 = 1.3;

    // rotation about a skew axis plus a translation
    Eigen::Matrix3d rot =
        (Eigen::AngleAxisd(0.83, Eigen::Vector3d(1, 2, -1).normalized())).toRotationMatrix();
    Eigen::MatrixXd moved = (m.vertices * rot.transpose()).rowwise() +
                            Eigen::RowVector3d(0.3, -4.0, 11.0);

    const auto idx = iota_vec(m.vertex_count());
    const Eigen::MatrixXd a = KernelModel::extrinsic(espec, m.vertices).gram(idx, idx);
    const Eigen::MatrixXd b = KernelModel::extrinsic(espec, moved).gram(idx, idx);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("increasing J approaches a limit monotonically (Cauchy) on the circle") {
    const Spectrum s = oracles::circle_spectrum(128, 33);
    double prev_diff = 1e300;
    double prev_val = 0.0;
    bool first = true;
    for (int J : {5, 9, 17, 33}) {
        const KernelModel k = KernelModel::intrinsic(intrinsic_spec(2.5, 1.0, 1.0, J, 1), s);
        const double val = k.at(0, 7);
        if (!first) {
            const double diff = std::abs(val - prev_val);
            CHECK(diff < prev_diff);
            prev_diff = diff;
        }
        prev_val = val;
        first = false;
    }
}

TEST_CASE("kernel field k(., x0) is finite everywhere and exportable") {
    const DiscreteManifold m = gen_dumbbell(256, 1.0, 0.2, 2.2);
    const Spectrum s = solve_eigs(m, 48);
    const KernelModel k =
        KernelModel::intrinsic(intrinsic_spec(2.5, 2.0, 1.0, 48, 1), s);
    const std::vector<int> center = {17};
    const Eigen::VectorXd field = k.gram(iota_vec(m.vertex_count()), center).col(0);
    for (int i = 0; i < field.size(); ++i) CHECK(std::isfinite(field[i]));
}

TEST_CASE("sample_prior: determinism, scaling, and Monte-Carlo variance") {
    const DiscreteManifold m = gen_circle(128, 1.0);
    const Spectrum s = solve_eigs(m, 16);
    const KernelSpec spec = intrinsic_spec(2.5, 1.0, 1.0, 16, 1);

    const Eigen::VectorXd a = sample_prior(spec, s, 42);
    const Eigen::VectorXd b = sample_prior(spec, s, 42);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a - sample_prior(spec, s, 43)).cwiseAbs().maxCoeff() > 0.0);

    KernelSpec scaled = spec;
    scaled.sigma_f2 = 4.0;
    const Eigen::VectorXd c = sample_prior(scaled, s, 42);
    CHECK((c - 2.0 * a).cwiseAbs().maxCoeff() < 1e-12);

    // empirical variance at a fixed vertex over 2000 samples vs k(x,x)
    const KernelModel k = KernelModel::intrinsic(spec, s);
    const double want = k.at(31, 31);
    double acc = 0.0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        const double v = sample_prior(spec, s, 1000 + r)[31];
        acc += v * v;
    }
    const double got = acc / reps;
    CHECK(std::abs(got - want) / want < 0.10);
}
