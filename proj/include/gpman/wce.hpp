#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>

#include "gpman/kernels.hpp"

namespace gpman {

// Pointwise worst-case prediction error over the unit ball of the intrinsic
// kernel's RKHS, plus spatial summaries.
struct WceField {
    std::string model_tag;     // intrinsic_exact | extrinsic_approx | intrinsic_approx
    Eigen::VectorXd values;    // per target vertex, clamped at 0 from tiny negatives
    double mean = 0.0;         // arithmetic mean over targets
    double spatial_std = 0.0;  // population std over targets

    struct Meta {
        int n_data = 0;
        std::uint64_t seed = 0;
        int xprime_size = 0;
        double rank_tol = 0.0;
        int rank_used = 0;
        double jitter = 0.0;
    } meta;
};

// Exact worst-case error of the well-specified model (posterior variance):
//   v(t) = k(t,t) - K_tX (K_XX + sigma_eps2 I)^{-1} K_Xt.
WceField wce_intrinsic(const KernelModel& model, std::span<const int> data_x,
                       std::span<const int> targets, double sigma_eps2,
                       Exec exec = Exec::parallel);

// RKHS-norm approximation of the worst-case error of the model `eval`
// against the worst-case class defined by the intrinsic kernel `oracle`:
//   vt = g_t(X')^T C_{X'X'}^+ g_t(X') + s2 * |alpha_t|^2
//   g_t(X') = C_{X't} - C_{X'X} alpha_t^T,  alpha_t = K_tX (K_XX + sigma_eps2 I)^{-1}
// with an eigen-truncated pseudo-inverse (relative cutoff rank_tol). The s2
// inside the formula defaults to sigma_eps2; tests can pass formula_noise=0
// to isolate the noise-propagation term.
WceField wce_extrinsic_approx(const KernelModel& eval, const KernelModel& oracle,
                              std::span<const int> data_x, std::span<const int> targets,
                              std::span<const int> xprime, double sigma_eps2,
                              double rank_tol = 1e-10, Exec exec = Exec::parallel,
                              std::optional<double> formula_noise = std::nullopt);

// Spatial mean over X' computed through the trace identity
//   (1/|X'|) [ tr(g_{X'}(X')^T C_{X'X'}^+ g_{X'}(X')) + s2 sum_t |alpha_t|^2 ];
// equals the per-point average of wce_extrinsic_approx with targets = X'.
double wce_spatial_mean_trace(const KernelModel& eval, const KernelModel& oracle,
                              std::span<const int> data_x, std::span<const int> xprime,
                              double sigma_eps2, double rank_tol = 1e-10);

} // namespace gpman
