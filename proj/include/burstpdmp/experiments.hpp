#pragma once

// Experiment commands behind the CLI.  Each cmd_* takes a fully resolved
// config, writes CSV outputs plus a manifest.json into cfg.out_dir, and
// returns the output list.  CSV bytes depend only on the config (seed
// included), so a re-run from a manifest reproduces them exactly; manifests
// additionally carry timings and a timestamp and are not byte-stable.

#include <string>
#include <vector>

#include "burstpdmp/config.hpp"

namespace burstpdmp {

struct RunResult {
    std::string out_dir;
    std::vector<std::string> outputs; // CSV file names relative to out_dir
    std::string manifest_path;
    std::string summary; // short human-readable report for stdout
};

RunResult cmd_simulate(const ExperimentConfig& cfg);
RunResult cmd_reduce(const ExperimentConfig& cfg);
RunResult cmd_moments(const ExperimentConfig& cfg);
RunResult cmd_density(const ExperimentConfig& cfg);
RunResult cmd_reproduce_fig1(const ExperimentConfig& cfg);
RunResult cmd_reproduce_fig2(const ExperimentConfig& cfg);

struct SelfCheckOptions {
    double flow_tol = 1e-10;
    std::uint64_t seed = 20260814;
};

struct SelfCheckReport {
    bool passed = false;
    std::string text; // one [PASS]/[FAIL] line per check plus a trailer
};

SelfCheckReport run_selfcheck(const SelfCheckOptions& opt = {});

// Effective thread count: config value if positive, else BURSTPDMP_THREADS,
// else hardware concurrency.
int resolve_threads_setting(const ExperimentConfig& cfg);

// Auto rules used when the config leaves burn_in / window / y_max unset.
double resolve_burn_in(const SimConfig& sim, const ModelParams& p);
double resolve_window(const SimConfig& sim, const BurstRate& rate, std::size_t n_samples);
double resolve_y_max(const ExperimentConfig& cfg, const Model2D& reference);

} // namespace burstpdmp
