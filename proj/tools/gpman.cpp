#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "gpman/csv.hpp"
#include "gpman/exec.hpp"
#include "gpman/experiments.hpp"
#include "gpman/rng.hpp"
#include "gpman/spectral.hpp"
#include "gpman/types.hpp"

namespace {

using namespace gpman;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir = "out";
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "flat key = value configuration file");
    cmd->add_option("--set", args.sets, "override: key=value (repeatable)");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--threads", args.threads, "OpenMP thread count (0 = library default)");
}

Config assemble_config(const CommonArgs& args) {
    Config cfg = args.config_path.empty() ? Config::from_string("")
                                          : Config::from_file(args.config_path);
    for (const std::string& kv : args.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw config_error("--set expects key=value, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.threads > 0) set_threads(args.threads);
    return cfg;
}

void warn_unused(const Config& cfg) {
    for (const std::string& key : cfg.unused_keys())
        std::cerr << "warning: config key '" << key << "' was not used\n";
}

int cmd_eig(const CommonArgs& args) {
    Config cfg = assemble_config(args);
    const DiscreteManifold m = build_manifold(cfg);
    const int J = std::min(cfg.get_int("J", 64), m.vertex_count());
    const std::string cache = cfg.get_string("cache", "");
    Spectrum s;
    if (!cache.empty()) {
        std::filesystem::create_directories(cache);
        const std::uint64_t hash = spectrum_content_hash(m, J);
        char name[64];
        std::snprintf(name, sizeof(name), "spectrum_%016llx.bin",
                      static_cast<unsigned long long>(hash));
        const std::string path = cache + "/" + name;
        if (!load_spectrum_cache(path, hash, s)) {
            s = solve_eigs(m, J);
            save_spectrum_cache(path, s, hash);
        }
    } else {
        s = solve_eigs(m, J);
    }
    std::filesystem::create_directories(args.out_dir);
    std::string body = "j,lambda\n";
    for (int j = 0; j < s.count(); ++j)
        body += std::to_string(j) + "," + format_double(s.eigenvalues[j]) + "\n";
    write_text_atomic(args.out_dir + "/eigenvalues.csv", body);
    std::cout << "n=" << m.vertex_count() << " J=" << J << " total_mass=" << m.total_mass()
              << "\n";
    if (J >= 32) {
        const WeylFit fit = weyl_check(s);
        std::cout << "weyl_slope=" << fit.slope << " (expected " << 2.0 / m.dim
                  << " for d=" << m.dim << ")\n";
    }
    warn_unused(cfg);
    return 0;
}

int cmd_sample(const CommonArgs& args) {
    Config cfg = assemble_config(args);
    const DiscreteManifold m = build_manifold(cfg);
    KernelSpec spec;
    spec.family = KernelFamily::intrinsic;
    spec.nu = cfg.get_double("nu", 2.5);
    spec.kappa = cfg.get_double("kappa", 1.0);
    spec.sigma_f2 = cfg.get_double("sigma_f2", 1.0);
    spec.truncation = std::min(cfg.get_int("J", 64), m.vertex_count());
    spec.dim = m.dim;
    const Spectrum s = solve_eigs(m, spec.truncation);
    std::filesystem::create_directories(args.out_dir);
    for (const std::uint64_t seed : cfg.get_seed_list("seeds", {0})) {
        const Eigen::VectorXd field = sample_prior(spec, s, substream_seed(seed, "prior"));
        export_field(field, args.out_dir + "/field_sample_" + std::to_string(seed) + ".csv");
    }
    warn_unused(cfg);
    return 0;
}

int cmd_kernel_field(const CommonArgs& args) {
    Config cfg = assemble_config(args);
    const DiscreteManifold m = build_manifold(cfg);
    const std::string family = cfg.get_string("family", "intrinsic");
    const int center = cfg.get_int("center", 0);
    if (center < 0 || center >= m.vertex_count())
        throw config_error("kernel-field: center vertex out of range");
    KernelSpec spec;
    spec.nu = cfg.get_double("nu", 2.5);
    spec.kappa = cfg.get_double("kappa", 1.0);
    spec.sigma_f2 = cfg.get_double("sigma_f2", 1.0);
    spec.dim = m.dim;
    Eigen::VectorXd values(m.vertex_count());
    std::vector<int> all(m.vertex_count());
    std::iota(all.begin(), all.end(), 0);
    const std::vector<int> ctr = {center};
    Spectrum s;
    if (family == "intrinsic") {
        spec.family = KernelFamily::intrinsic;
        spec.truncation = std::min(cfg.get_int("J", 64), m.vertex_count());
        s = solve_eigs(m, spec.truncation);
        values = KernelModel::intrinsic(spec, s).gram(all, ctr).col(0);
    } else if (family == "extrinsic") {
        spec.family = KernelFamily::extrinsic;
        values = KernelModel::extrinsic(spec, m.vertices).gram(all, ctr).col(0);
    } else {
        throw config_error("kernel-field: family must be intrinsic or extrinsic");
    }
    std::filesystem::create_directories(args.out_dir);
    export_field(values, args.out_dir + "/field_kernel_" + family + ".csv");
    warn_unused(cfg);
    return 0;
}

int cmd_wce(const CommonArgs& args) {
    Config cfg = assemble_config(args);
    const ExperimentConfig ec = ExperimentConfig::from_config(cfg, args.out_dir);
    warn_unused(cfg);
    const auto rows = run_wce_experiment(ec);
    std::cout << "wrote " << rows.size() << " summary rows to " << args.out_dir
              << "/summary.csv\n";
    return 0;
}

int cmd_rate(const CommonArgs& args) {
    Config cfg = assemble_config(args);
    const RateConfig rc = RateConfig::from_config(cfg, args.out_dir);
    warn_unused(cfg);
    const RateReport report = run_rate_experiment(rc);
    std::cout << "fitted_slope=" << report.fitted_slope
              << " theoretical_slope=" << report.theoretical_slope << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric Gaussian process toolkit: intrinsic/extrinsic Matern kernels on "
                 "discretized manifolds, GP regression, and worst-case prediction errors"};
    app.require_subcommand(1);

    CommonArgs eig_args, sample_args, kf_args, wce_args, rate_args;
    add_common(app.add_subcommand("eig", "solve Laplace-Beltrami eigenpairs"), eig_args);
    add_common(app.add_subcommand("sample", "draw Karhunen-Loeve prior samples"), sample_args);
    add_common(app.add_subcommand("kernel-field", "export k(., center) over the mesh"), kf_args);
    add_common(app.add_subcommand("wce", "worst-case-error experiment"), wce_args);
    add_common(app.add_subcommand("rate", "posterior contraction-rate experiment"), rate_args);

    try {
        app.parse(argc, argv);
        if (app.got_subcommand("eig")) return cmd_eig(eig_args);
        if (app.got_subcommand("sample")) return cmd_sample(sample_args);
        if (app.got_subcommand("kernel-field")) return cmd_kernel_field(kf_args);
        if (app.got_subcommand("wce")) return cmd_wce(wce_args);
        if (app.got_subcommand("rate")) return cmd_rate(rate_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const gpman::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const gpman::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const gpman::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
