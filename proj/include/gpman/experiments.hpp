#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpman/config.hpp"
#include "gpman/gp.hpp"
#include "gpman/mesh.hpp"
#include "gpman/wce.hpp"

namespace gpman {

// Uniform without replacement from {0,...,vertex_count-1}; deterministic per seed.
std::vector<int> sample_nodes(int n, int vertex_count, std::uint64_t seed);

// y_i = f0(x_i) + eps_i with independent N(0, sigma_eps2) noise.
Dataset generate_dataset(const Eigen::VectorXd& f0, std::span<const int> x, double sigma_eps2,
                         std::uint64_t seed);

DiscreteManifold build_manifold(const Config& cfg);

// Resolved configuration of the worst-case-error experiment (the Figure-3
// style comparison): per seed, sample data nodes, draw the ground truth from
// the intrinsic prior, optionally fit the extrinsic length scale, then
// compute the three worst-case-error fields over the full vertex set.
struct ExperimentConfig {
    DiscreteManifold manifold;
    KernelSpec kernel_intrinsic;  // nu, kappa, sigma_f2, J, d
    double nu_e = 0.0;
    double kappa_e_init = 0.0;
    bool fit_extrinsic_lengthscale = true;
    int fit_data_size = 500;  // separate fitting-set size when n_data < 500
    double sigma_eps2 = 5e-4;
    int n_data = 0;
    int xprime_size = 0;  // 0 -> n_data
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
    std::string cache_dir;  // optional spectrum cache location
    bool write_fields = true;

    static ExperimentConfig from_config(const Config& cfg, const std::string& out_dir);
};

struct WceSummaryRow {
    std::string model;
    std::uint64_t seed = 0;
    int n_data = 0;
    double mean = 0.0;
    double spatial_std = 0.0;
    double kappa_e = 0.0;  // fitted extrinsic length scale used for this seed
};

// Writes summary.csv and field_<model>_<seed>.csv under out_dir; flushes
// partial results after every seed. Returns the summary rows.
std::vector<WceSummaryRow> run_wce_experiment(const ExperimentConfig& cfg);

// Posterior-mean contraction study on manifolds with analytic ground truth.
struct RateConfig {
    DiscreteManifold manifold;
    KernelSpec kernel;  // intrinsic prior used for regression
    double sigma_eps2 = 0.03;
    std::vector<int> n_grid;
    int seeds = 20;
    std::uint64_t seed_base = 1000;
    // ground truth: a fixed Laplace-Beltrami eigenfunction, or a Matern
    // sample of smoothness beta drawn per seed
    bool f0_eigenfunction = true;
    int f0_index = 5;
    double f0_beta = 1.5;
    // Optional truncation schedule J_n = ceil(trunc_c * n^{d/(2 nu + d)}).
    bool truncation_schedule = false;
    double trunc_c = 8.0;
    std::string out_dir;  // empty -> no files

    static RateConfig from_config(const Config& cfg, const std::string& out_dir);
};

struct RateReport {
    std::vector<int> n_grid;
    Eigen::MatrixXd errors;       // |n_grid| x seeds, mass-weighted squared L2 errors
    Eigen::VectorXd mean_errors;  // per n, averaged over seeds
    double fitted_slope = 0.0;
    double intercept = 0.0;
    double theoretical_slope = 0.0;  // -2 min(beta, nu) / (2 nu + d)
};

RateReport run_rate_experiment(const RateConfig& cfg);

} // namespace gpman
