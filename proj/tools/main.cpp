// bergman: batch driver for weight reports, operator criteria, essential-norm
// sweeps and oracle cross-checks on weighted Bergman spaces.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "bergman/config.hpp"
#include "bergman/runner.hpp"
#include "bergman/util.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    int workers = 0;
    int quad_rings = -1;
    double quad_relerr = -1.0;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--workers", opts.workers, "worker thread budget (0 = hardware)");
    cmd->add_option("--quad.rings", opts.quad_rings, "override quad.rings");
    cmd->add_option("--quad.relerr", opts.quad_relerr, "override quad.relerr");
}

bergman::ExperimentConfig load(const CommonOpts& opts) {
    auto cfg = bergman::load_config(opts.config_path);
    if (opts.quad_rings > 0) cfg.quad.radial_rings = opts.quad_rings;
    if (opts.quad_relerr > 0.0) cfg.quad.rel_error_target = opts.quad_relerr;
    if (opts.workers > 0) bergman::set_worker_budget(opts.workers);
    return cfg;
}

int run(const CommonOpts& opts, int (*fn)(const bergman::ExperimentConfig&,
                                          const std::filesystem::path&)) {
    try {
        const auto cfg = load(opts);
        return fn(cfg, std::filesystem::path(opts.out_dir));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "criteria and essential-norm estimates for generalized weighted composition "
        "operators on Bergman spaces with radial doubling weights"};
    app.require_subcommand(1);

    CommonOpts weight_opts, criteria_opts, essnorm_opts, oracle_opts;
    auto* weight_cmd =
        app.add_subcommand("weight-report", "doubling diagnostics and box-mass table");
    add_common(weight_cmd, weight_opts);
    auto* criteria_cmd =
        app.add_subcommand("criteria", "order-boundedness / boundedness / Carleson criteria");
    add_common(criteria_cmd, criteria_opts);
    auto* essnorm_cmd =
        app.add_subcommand("essnorm", "essential-norm tail sweep with compactness verdict");
    add_common(essnorm_cmd, essnorm_opts);
    auto* oracle_cmd =
        app.add_subcommand("oracle", "pullback-identity and truncation cross-checks");
    add_common(oracle_cmd, oracle_opts);

    CLI11_PARSE(app, argc, argv);

    if (weight_cmd->parsed()) return run(weight_opts, bergman::run_weight_report);
    if (criteria_cmd->parsed()) return run(criteria_opts, bergman::run_criteria);
    if (essnorm_cmd->parsed()) return run(essnorm_opts, bergman::run_essnorm);
    if (oracle_cmd->parsed()) return run(oracle_opts, bergman::run_oracle);
    return 1;
}
