#include "gpman/wce.hpp"

#include <cmath>

#include "gpman/gp.hpp"
#include "gpman/types.hpp"

namespace gpman {

namespace {

// Clamp tiny negatives (roundoff) to zero; anything materially negative means
// the PSD structure is broken and must surface as an error.
void clamp_and_summarize(WceField& field, double amplitude) {
    const double floor = -1e-10 * std::max(1.0, amplitude);
    for (int i = 0; i < field.values.size(); ++i) {
        if (field.values[i] < floor)
            throw numerical_error("wce: negative worst-case error " +
                                  std::to_string(field.values[i]) + " at target " +
                                  std::to_string(i));
        if (field.values[i] < 0.0) field.values[i] = 0.0;
    }
    const int n = static_cast<int>(field.values.size());
    if (n == 0) return;
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += field.values[i];
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = field.values[i] - mean;
        var += d * d;
    }
    field.mean = mean;
    field.spatial_std = std::sqrt(var / n);
}

Dataset zero_targets(std::span<const int> data_x, double sigma_eps2) {
    Dataset d;
    d.x.assign(data_x.begin(), data_x.end());
    d.y = Eigen::VectorXd::Zero(static_cast<int>(data_x.size()));
    d.sigma_eps2 = sigma_eps2;
    return d;
}

} // namespace

WceField wce_intrinsic(const KernelModel& model, std::span<const int> data_x,
                       std::span<const int> targets, double sigma_eps2, Exec exec) {
    const int nt = static_cast<int>(targets.size());
    const int nx = static_cast<int>(data_x.size());
    WceField field;
    field.model_tag = "intrinsic_exact";
    field.meta.n_data = nx;
    field.values = model.diag(targets);

    if (nx > 0) {
        const GpFit f = fit(model, zero_targets(data_x, sigma_eps2));
        field.meta.jitter = f.jitter;
        const auto solve_one = [&](int t) {
            Eigen::VectorXd kxt(nx);
            for (int i = 0; i < nx; ++i) kxt[i] = model.at(data_x[i], targets[t]);
            f.chol_L.triangularView<Eigen::Lower>().solveInPlace(kxt);
            field.values[t] -= kxt.squaredNorm();
        };
        if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
            for (int t = 0; t < nt; ++t) solve_one(t);
        } else {
            for (int t = 0; t < nt; ++t) solve_one(t);
        }
    }
    clamp_and_summarize(field, model.spec().sigma_f2);
    return field;
}

namespace {

// Shared state of the Appendix-style approximation: the pseudo-inverse factor
// of C_{X'X'} and the posterior weight columns of the eval model.
struct ApproxParts {
    Eigen::MatrixXd pinv_factor;  // m x r, C^+ = factor factor^T
    Eigen::MatrixXd alphas;       // nx x nt (empty if no data)
    Eigen::MatrixXd g;            // m x nt, g_t columns
    int rank = 0;
    double jitter = 0.0;
};

ApproxParts build_approx(const KernelModel& eval, const KernelModel& oracle,
                         std::span<const int> data_x, std::span<const int> targets,
                         std::span<const int> xprime, double sigma_eps2, double rank_tol) {
    if (xprime.empty()) throw config_error("wce_extrinsic_approx: X' must be nonempty");
    if (oracle.spec().family != KernelFamily::intrinsic)
        throw config_error("wce_extrinsic_approx: the worst-case class is defined by an "
                           "intrinsic kernel");
    ApproxParts parts;
    const int nx = static_cast<int>(data_x.size());

    const Eigen::MatrixXd c_pp = oracle.gram(xprime, xprime);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c_pp);
    if (es.info() != Eigen::Success)
        throw numerical_error("wce_extrinsic_approx: eigendecomposition of C_{X'X'} failed");
    const double lam_max = es.eigenvalues().cwiseAbs().maxCoeff();
    const double cutoff = rank_tol * lam_max;
    const int m = static_cast<int>(xprime.size());
    int rank = 0;
    for (int i = 0; i < m; ++i)
        if (es.eigenvalues()[i] > cutoff) ++rank;
    parts.rank = rank;
    parts.pinv_factor.resize(m, rank);
    int col = 0;
    for (int i = 0; i < m; ++i) {
        if (es.eigenvalues()[i] > cutoff) {
            parts.pinv_factor.col(col) =
                es.eigenvectors().col(i) / std::sqrt(es.eigenvalues()[i]);
            ++col;
        }
    }

    parts.g = oracle.gram(xprime, targets);
    if (nx > 0) {
        const GpFit f = fit(eval, zero_targets(data_x, sigma_eps2));
        parts.jitter = f.jitter;
        const Eigen::MatrixXd k_xt = eval.gram(data_x, targets);
        Eigen::MatrixXd w = f.chol_L.triangularView<Eigen::Lower>().solve(k_xt);
        f.chol_L.triangularView<Eigen::Lower>().transpose().solveInPlace(w);
        parts.alphas = std::move(w);  // nx x nt
        const Eigen::MatrixXd c_px = oracle.gram(xprime, data_x);
        parts.g.noalias() -= c_px * parts.alphas;
    }
    return parts;
}

} // namespace

WceField wce_extrinsic_approx(const KernelModel& eval, const KernelModel& oracle,
                              std::span<const int> data_x, std::span<const int> targets,
                              std::span<const int> xprime, double sigma_eps2, double rank_tol,
                              Exec exec, std::optional<double> formula_noise) {
    const ApproxParts parts =
        build_approx(eval, oracle, data_x, targets, xprime, sigma_eps2, rank_tol);
    const double s2 = formula_noise.value_or(sigma_eps2);
    const int nt = static_cast<int>(targets.size());

    WceField field;
    field.model_tag = eval.spec().family == KernelFamily::extrinsic ? "extrinsic_approx"
                                                                    : "intrinsic_approx";
    field.meta.n_data = static_cast<int>(data_x.size());
    field.meta.xprime_size = static_cast<int>(xprime.size());
    field.meta.rank_tol = rank_tol;
    field.meta.rank_used = parts.rank;
    field.meta.jitter = parts.jitter;
    field.values.resize(nt);

    const auto eval_one = [&](int t) {
        double v = (parts.pinv_factor.transpose() * parts.g.col(t)).squaredNorm();
        if (parts.alphas.size() > 0) v += s2 * parts.alphas.col(t).squaredNorm();
        field.values[t] = v;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int t = 0; t < nt; ++t) eval_one(t);
    } else {
        for (int t = 0; t < nt; ++t) eval_one(t);
    }
    clamp_and_summarize(field, oracle.spec().sigma_f2);
    return field;
}

double wce_spatial_mean_trace(const KernelModel& eval, const KernelModel& oracle,
                              std::span<const int> data_x, std::span<const int> xprime,
                              double sigma_eps2, double rank_tol) {
    const ApproxParts parts =
        build_approx(eval, oracle, data_x, xprime, xprime, sigma_eps2, rank_tol);
    const Eigen::MatrixXd q = parts.pinv_factor.transpose() * parts.g;
    double total = q.squaredNorm();  // tr(G^T C^+ G)
    if (parts.alphas.size() > 0) total += sigma_eps2 * parts.alphas.squaredNorm();
    return total / static_cast<double>(xprime.size());
}

} // namespace gpman
