#pragma once

// Experiment configuration: a JSON document with every field defaulted so the
// figure-reproduction commands run with no arguments.  parse_config rejects
// unknown or mistyped fields with the offending field path; render_config
// emits the fully resolved document in a fixed field order, so
// parse_config(render_config(c)) == c and rendered bytes are reproducible.

#include <cstdint>
#include <string>
#include <vector>

#include "burstpdmp/model.hpp"

namespace burstpdmp {

struct RateConfig {
    std::string kind = "hill"; // "constant" | "hill"
    double value = 2.0;        // constant only
    double phi0 = 5.0;         // hill fields
    double K = 1.0;
    double A = 4.0;
    double B = 1.0;
    double n = 4.0;
    bool operator==(const RateConfig&) const = default;
};

struct BurstConfig {
    std::string kind = "exponential"; // "exponential" | "tabulated"
    double mean = 5.0;                // exponential only
    double dy = 0.0;                  // tabulated grid spacing
    std::vector<double> pdf{};        // tabulated density values at i * dy
    bool operator==(const BurstConfig&) const = default;
};

struct ModelConfig {
    double gamma1 = 10.0;
    double gamma2 = 1.0;
    double lambda2 = 2.0;
    RateConfig rate{};
    BurstConfig burst{};
    bool operator==(const ModelConfig&) const = default;
};

struct InitialConfig {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const InitialConfig&) const = default;
};

struct SimConfig {
    std::string process = "full2d"; // "full2d" | "reduced"
    double horizon = 100.0;
    double obs_dt = 1.0;
    std::int64_t n_samples = 1'000'000; // stationary sampling commands
    int n_replicas = 4;                 // trajectory replicas for `simulate`
    double burn_in = -1.0;              // < 0: auto max(20/gamma2, 20/gamma1)
    double window = -1.0;               // <= 0: auto 4 / rate upper bound
    bool operator==(const SimConfig&) const = default;
};

struct ScalingConfig {
    std::string kind = "S2"; // "S1" | "S2" | "S3"
    double gamma1_ref = 10.0;
    std::vector<double> grid{0.1, 1.0, 10.0, 100.0};
    bool operator==(const ScalingConfig&) const = default;
};

struct DensityConfig {
    int n_bins = 200;
    double y_max = 0.0; // <= 0: auto from the analytic tail cutoff
    bool operator==(const DensityConfig&) const = default;
};

struct MomentConfig {
    int order = 2;
    double t = 5.0;                     // ensemble observation time
    std::int64_t n_replicas = 100'000;  // per grid point
    std::vector<double> grid{1.0, 10.0, 100.0, 1000.0};
    bool operator==(const MomentConfig&) const = default;
};

struct ExperimentConfig {
    ModelConfig model{};
    InitialConfig initial{};
    SimConfig sim{};
    ScalingConfig scaling{};
    DensityConfig density{};
    MomentConfig moments{};
    std::uint64_t seed = 20260814;
    int threads = 0; // 0: resolve from BURSTPDMP_THREADS or hardware
    std::string out_dir = "out";
    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig default_config();

// Throws config_error naming the field path on unknown fields, wrong types,
// or malformed JSON.  Accepts a bare config document or a run manifest (any
// document with a top-level "config" object is unwrapped first).
ExperimentConfig parse_config(const std::string& json_text);

std::string render_config(const ExperimentConfig& cfg);

ExperimentConfig load_config_file(const std::string& path);

// FNV-1a 64 over the rendered config, formatted as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

// Construct the process objects a config describes.  Validation errors from
// the model layer surface as config_error.
BurstRate build_rate(const RateConfig& cfg);
JumpDensity build_burst(const BurstConfig& cfg);
Model2D build_model(const ModelConfig& cfg);
ScalingFamily build_scaling(const ExperimentConfig& cfg);

} // namespace burstpdmp
