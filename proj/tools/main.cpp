// burstpdmp command line tool.
//
// Exit codes: 0 success, 2 configuration error (including bad flags),
// 3 numeric failure, 4 self-check failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "burstpdmp/config.hpp"
#include "burstpdmp/errors.hpp"
#include "burstpdmp/experiments.hpp"
#include "burstpdmp/version.hpp"

namespace {

using namespace burstpdmp;

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 0;
    std::vector<double> gamma1;
    CLI::App* sub = nullptr;
};

void add_common(CLI::App* sub, CommonFlags& f) {
    f.sub = sub;
    sub->add_option("--config", f.config_path, "Config or manifest JSON file");
    sub->add_option("--seed", f.seed, "Override the RNG seed");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--threads", f.threads,
                    "Worker threads (default: config, else BURSTPDMP_THREADS, else hardware)");
    sub->add_option("--gamma1", f.gamma1, "Override the gamma1 grid (sweeps) or value (single runs)")
        ->delimiter(',');
}

// Applies flag overrides on top of the loaded (or default) config.
ExperimentConfig resolve(const CommonFlags& f, bool single_gamma1, bool moments_grid) {
    ExperimentConfig cfg =
        f.config_path.empty() ? default_config() : load_config_file(f.config_path);
    if (f.sub->count("--seed")) cfg.seed = f.seed;
    if (f.sub->count("--threads")) cfg.threads = f.threads;
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (!f.gamma1.empty()) {
        if (single_gamma1) {
            if (f.gamma1.size() != 1)
                throw config_error("--gamma1: this command takes a single value");
            cfg.model.gamma1 = f.gamma1.front();
        } else if (moments_grid) {
            cfg.moments.grid = f.gamma1;
        } else {
            cfg.scaling.grid = f.gamma1;
        }
    }
    return cfg;
}

int report(const RunResult& res) {
    std::cout << res.summary << "\n";
    std::cout << "manifest: " << res.manifest_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bursting gene expression: exact jump-process simulation, adiabatic "
                 "reduction limits, and density-level comparison"};
    app.set_version_flag("--version", burstpdmp::kVersion);
    app.require_subcommand(1);

    CommonFlags sim_f, red_f, mom_f, den_f, f1_f, f2_f;
    add_common(app.add_subcommand("simulate", "Simulate trajectories of the two-variable process"),
               sim_f);
    add_common(app.add_subcommand("reduce", "Run the reduced limit model (ODE or jump process)"),
               red_f);
    add_common(app.add_subcommand("moments", "Moment scaling sweep with fitted growth exponents"),
               mom_f);
    add_common(app.add_subcommand("density", "Stationary histograms vs the analytic law"), den_f);
    add_common(app.add_subcommand("reproduce-fig1",
                                  "Histograms of X and Y with the analytic overlay, per gamma1"),
               f1_f);
    add_common(app.add_subcommand("reproduce-fig2",
                                  "Distance sweep, Y mean, and moment scaling panels"),
               f2_f);

    auto* selfcheck = app.add_subcommand("selfcheck", "Fast invariant checks (< 2 min)");
    SelfCheckOptions sc_opt;
    selfcheck->add_option("--flow-tol", sc_opt.flow_tol,
                          "Tolerance for the flow-exactness check (default 1e-10)");
    selfcheck->add_option("--seed", sc_opt.seed, "Seed for the statistical checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // bad flags are configuration errors
    }

    try {
        if (selfcheck->parsed()) {
            const SelfCheckReport rep = run_selfcheck(sc_opt);
            std::cout << rep.text;
            return rep.passed ? 0 : 4;
        }
        if (sim_f.sub->parsed()) return report(cmd_simulate(resolve(sim_f, true, false)));
        if (red_f.sub->parsed()) return report(cmd_reduce(resolve(red_f, true, false)));
        if (mom_f.sub->parsed()) return report(cmd_moments(resolve(mom_f, false, true)));
        if (den_f.sub->parsed()) return report(cmd_density(resolve(den_f, false, false)));
        if (f1_f.sub->parsed()) return report(cmd_reproduce_fig1(resolve(f1_f, false, false)));
        if (f2_f.sub->parsed()) return report(cmd_reproduce_fig2(resolve(f2_f, false, false)));
    } catch (const burstpdmp::check_failure& e) {
        std::cerr << "check failure: " << e.what() << "\n";
        return 4;
    } catch (const burstpdmp::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const burstpdmp::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
