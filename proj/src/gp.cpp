#include "gpman/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "gpman/types.hpp"

namespace gpman {

namespace {

void validate(const Dataset& data) {
    if (static_cast<int>(data.x.size()) != data.y.size())
        throw config_error("gp: |x| != |y|");
    if (!data.x.empty() && !(data.sigma_eps2 > 0.0))
        throw config_error("gp: sigma_eps2 must be positive");
    std::vector<int> sorted = data.x;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw config_error("gp: training indices must be distinct");
}

// Cholesky with escalating jitter 1e-12..1e-6 (decades, scaled by sigma_f2).
// Returns the jitter that succeeded.
double robust_cholesky(const Eigen::MatrixXd& k, double sigma_eps2, double sigma_f2,
                       Eigen::MatrixXd& chol_L) {
    const int n = static_cast<int>(k.rows());
    Eigen::MatrixXd sys = k;
    sys.diagonal().array() += sigma_eps2;
    Eigen::LLT<Eigen::MatrixXd> llt(sys);
    if (llt.info() == Eigen::Success) {
        chol_L = llt.matrixL();
        return 0.0;
    }
    for (double jitter = 1e-12 * sigma_f2; jitter <= 1.0000001e-6 * sigma_f2; jitter *= 10.0) {
        Eigen::MatrixXd attempt = sys;
        attempt.diagonal().array() += jitter;
        llt.compute(attempt);
        if (llt.info() == Eigen::Success) {
            chol_L = llt.matrixL();
            return jitter;
        }
    }
    throw numerical_error("gp: Cholesky failed after jitter escalation to 1e-6*sigma_f2 (n=" +
                          std::to_string(n) + ")");
}

} // namespace

GpFit fit(const KernelModel& model, const Dataset& data) {
    validate(data);
    GpFit out{model, data, {}, {}, 0.0};
    const int n = static_cast<int>(data.x.size());
    if (n == 0) {
        out.chol_L.resize(0, 0);
        out.alpha.resize(0);
        return out;
    }
    const Eigen::MatrixXd kxx = model.gram(data.x, data.x);
    out.jitter = robust_cholesky(kxx, data.sigma_eps2, model.spec().sigma_f2, out.chol_L);
    out.alpha = out.chol_L.triangularView<Eigen::Lower>().solve(data.y);
    out.chol_L.triangularView<Eigen::Lower>().transpose().solveInPlace(out.alpha);
    return out;
}

Eigen::VectorXd predict_mean(const GpFit& fit, std::span<const int> targets) {
    if (fit.data.x.empty())
        return Eigen::VectorXd::Zero(static_cast<int>(targets.size()));
    const Eigen::MatrixXd ktx = fit.model.gram(targets, fit.data.x);
    return ktx * fit.alpha;
}

Prediction predict(const GpFit& fit, std::span<const int> targets) {
    Prediction p;
    const Eigen::MatrixXd ktt = fit.model.gram(targets, targets);
    if (fit.data.x.empty()) {
        p.mean = Eigen::VectorXd::Zero(static_cast<int>(targets.size()));
        p.cov = ktt;
        return p;
    }
    const Eigen::MatrixXd kxt = fit.model.gram(fit.data.x, targets);
    p.mean = kxt.transpose() * fit.alpha;
    const Eigen::MatrixXd w = fit.chol_L.triangularView<Eigen::Lower>().solve(kxt);
    p.cov = ktt - w.transpose() * w;
    return p;
}

double log_marginal_likelihood(const KernelModel& model, const Dataset& data) {
    const GpFit f = fit(model, data);
    const int n = static_cast<int>(data.x.size());
    if (n == 0) return 0.0;
    double log_det_half = 0.0;
    for (int i = 0; i < n; ++i) log_det_half += std::log(f.chol_L(i, i));
    return -0.5 * data.y.dot(f.alpha) - log_det_half -
           0.5 * n * std::log(2.0 * std::numbers::pi);
}

double fit_lengthscale(const KernelModel& model, const Dataset& data, double kappa0) {
    if (!(kappa0 > 0.0)) throw config_error("fit_lengthscale: kappa0 must be positive");
    auto objective = [&](double log_kappa) {
        try {
            const double v = log_marginal_likelihood(model.with_kappa(std::exp(log_kappa)), data);
            return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
        } catch (const numerical_error&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    double lo = std::log(kappa0 / 32.0);
    double hi = std::log(kappa0 * 32.0);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    if (!std::isfinite(f1) && !std::isfinite(f2))
        throw numerical_error("fit_lengthscale: marginal likelihood non-finite across the bracket");
    while (hi - lo > 1e-3) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        }
    }
    const double fitted = std::exp(0.5 * (lo + hi));
    // never return something worse than the starting point
    const double lml_fitted = objective(std::log(fitted));
    const double lml_start = objective(std::log(kappa0));
    if (!(lml_fitted >= lml_start)) return kappa0;
    return fitted;
}

} // namespace gpman
