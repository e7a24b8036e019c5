#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

#include "gpman/kernels.hpp"

namespace gpman {

struct Dataset {
    std::vector<int> x;    // distinct training vertex indices
    Eigen::VectorXd y;     // targets
    double sigma_eps2 = 0; // known noise variance, > 0 unless the dataset is empty
};

// Exact GP posterior state: lower Cholesky factor of K_xx + (sigma_eps2 +
// jitter) I and the solved weights alpha.
struct GpFit {
    KernelModel model;
    Dataset data;
    Eigen::MatrixXd chol_L;
    Eigen::VectorXd alpha;
    double jitter = 0.0;  // extra diagonal added to make the factorization succeed
};

struct Prediction {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

GpFit fit(const KernelModel& model, const Dataset& data);

Prediction predict(const GpFit& fit, std::span<const int> targets);
Eigen::VectorXd predict_mean(const GpFit& fit, std::span<const int> targets);

double log_marginal_likelihood(const KernelModel& model, const Dataset& data);

// Golden-section maximization of the marginal likelihood over log kappa on
// [kappa0/32, 32 kappa0], tolerance 1e-3 in log kappa. Deterministic; the
// returned kappa never has lower marginal likelihood than kappa0.
double fit_lengthscale(const KernelModel& model, const Dataset& data, double kappa0);

} // namespace gpman
