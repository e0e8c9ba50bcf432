#include "burstpdmp/config.hpp"

#include <cstdio>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "burstpdmp/csv.hpp"
#include "burstpdmp/errors.hpp"

namespace burstpdmp {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw config_error("config field '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> known) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) fail(join(path, it.key()), "unknown field");
    }
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void get(const json& j, const std::string& path, const char* key, double& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    out = v.get<double>();
}

void get(const json& j, const std::string& path, const char* key, int& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(join(path, key), "expected an integer");
    out = v.get<int>();
}

void get(const json& j, const std::string& path, const char* key, std::int64_t& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number_integer() && !v.is_number_unsigned()) fail(join(path, key), "expected an integer");
    out = v.get<std::int64_t>();
}

void get(const json& j, const std::string& path, const char* key, std::uint64_t& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (v.is_number_integer() && v.get<std::int64_t>() < 0)
        fail(join(path, key), "expected a non-negative integer");
    if (!v.is_number_integer() && !v.is_number_unsigned())
        fail(join(path, key), "expected a non-negative integer");
    out = v.get<std::uint64_t>();
}

void get(const json& j, const std::string& path, const char* key, std::string& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    out = v.get<std::string>();
}

void get(const json& j, const std::string& path, const char* key, std::vector<double>& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_array()) fail(join(path, key), "expected an array of numbers");
    std::vector<double> vals;
    vals.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            fail(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
        vals.push_back(v[i].get<double>());
    }
    out = std::move(vals);
}

RateConfig parse_rate(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"kind", "value", "phi0", "K", "A", "B", "n"});
    RateConfig c;
    get(j, path, "kind", c.kind);
    if (c.kind != "constant" && c.kind != "hill")
        fail(join(path, "kind"), "expected \"constant\" or \"hill\", got \"" + c.kind + "\"");
    get(j, path, "value", c.value);
    get(j, path, "phi0", c.phi0);
    get(j, path, "K", c.K);
    get(j, path, "A", c.A);
    get(j, path, "B", c.B);
    get(j, path, "n", c.n);
    return c;
}

BurstConfig parse_burst(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"kind", "mean", "dy", "pdf"});
    BurstConfig c;
    get(j, path, "kind", c.kind);
    if (c.kind != "exponential" && c.kind != "tabulated")
        fail(join(path, "kind"), "expected \"exponential\" or \"tabulated\", got \"" + c.kind + "\"");
    get(j, path, "mean", c.mean);
    get(j, path, "dy", c.dy);
    get(j, path, "pdf", c.pdf);
    return c;
}

ModelConfig parse_model(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"gamma1", "gamma2", "lambda2", "rate", "burst"});
    ModelConfig c;
    get(j, path, "gamma1", c.gamma1);
    get(j, path, "gamma2", c.gamma2);
    get(j, path, "lambda2", c.lambda2);
    if (j.contains("rate")) c.rate = parse_rate(j.at("rate"), join(path, "rate"));
    if (j.contains("burst")) c.burst = parse_burst(j.at("burst"), join(path, "burst"));
    return c;
}

InitialConfig parse_initial(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"x", "y"});
    InitialConfig c;
    get(j, path, "x", c.x);
    get(j, path, "y", c.y);
    return c;
}

SimConfig parse_sim(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path,
               {"process", "horizon", "obs_dt", "n_samples", "n_replicas", "burn_in", "window"});
    SimConfig c;
    get(j, path, "process", c.process);
    if (c.process != "full2d" && c.process != "reduced")
        fail(join(path, "process"), "expected \"full2d\" or \"reduced\", got \"" + c.process + "\"");
    get(j, path, "horizon", c.horizon);
    get(j, path, "obs_dt", c.obs_dt);
    get(j, path, "n_samples", c.n_samples);
    get(j, path, "n_replicas", c.n_replicas);
    get(j, path, "burn_in", c.burn_in);
    get(j, path, "window", c.window);
    return c;
}

ScalingConfig parse_scaling(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"kind", "gamma1_ref", "grid"});
    ScalingConfig c;
    get(j, path, "kind", c.kind);
    if (c.kind != "S1" && c.kind != "S2" && c.kind != "S3")
        fail(join(path, "kind"), "expected \"S1\", \"S2\" or \"S3\", got \"" + c.kind + "\"");
    get(j, path, "gamma1_ref", c.gamma1_ref);
    get(j, path, "grid", c.grid);
    return c;
}

DensityConfig parse_density(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"n_bins", "y_max"});
    DensityConfig c;
    get(j, path, "n_bins", c.n_bins);
    get(j, path, "y_max", c.y_max);
    return c;
}

MomentConfig parse_moments(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"order", "t", "n_replicas", "grid"});
    MomentConfig c;
    get(j, path, "order", c.order);
    get(j, path, "t", c.t);
    get(j, path, "n_replicas", c.n_replicas);
    get(j, path, "grid", c.grid);
    return c;
}

json render_rate(const RateConfig& c) {
    json j;
    j["kind"] = c.kind;
    j["value"] = c.value;
    j["phi0"] = c.phi0;
    j["K"] = c.K;
    j["A"] = c.A;
    j["B"] = c.B;
    j["n"] = c.n;
    return j;
}

json render_burst(const BurstConfig& c) {
    json j;
    j["kind"] = c.kind;
    j["mean"] = c.mean;
    j["dy"] = c.dy;
    j["pdf"] = c.pdf;
    return j;
}

} // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw config_error("config: expected a JSON object at top level");
    if (root.contains("config")) {
        // Run manifest: the resolved config is embedded under "config".
        root = root.at("config");
        if (!root.is_object()) throw config_error("config field 'config': expected an object");
    }
    check_keys(root, "",
               {"model", "initial", "sim", "scaling", "density", "moments", "seed", "threads",
                "out_dir"});
    ExperimentConfig c;
    if (root.contains("model")) c.model = parse_model(root.at("model"), "model");
    if (root.contains("initial")) c.initial = parse_initial(root.at("initial"), "initial");
    if (root.contains("sim")) c.sim = parse_sim(root.at("sim"), "sim");
    if (root.contains("scaling")) c.scaling = parse_scaling(root.at("scaling"), "scaling");
    if (root.contains("density")) c.density = parse_density(root.at("density"), "density");
    if (root.contains("moments")) c.moments = parse_moments(root.at("moments"), "moments");
    get(root, "", "seed", c.seed);
    get(root, "", "threads", c.threads);
    get(root, "", "out_dir", c.out_dir);
    return c;
}

std::string render_config(const ExperimentConfig& c) {
    json j;
    json model;
    model["gamma1"] = c.model.gamma1;
    model["gamma2"] = c.model.gamma2;
    model["lambda2"] = c.model.lambda2;
    model["rate"] = render_rate(c.model.rate);
    model["burst"] = render_burst(c.model.burst);
    j["model"] = std::move(model);
    j["initial"] = json{{"x", c.initial.x}, {"y", c.initial.y}};
    json sim;
    sim["process"] = c.sim.process;
    sim["horizon"] = c.sim.horizon;
    sim["obs_dt"] = c.sim.obs_dt;
    sim["n_samples"] = c.sim.n_samples;
    sim["n_replicas"] = c.sim.n_replicas;
    sim["burn_in"] = c.sim.burn_in;
    sim["window"] = c.sim.window;
    j["sim"] = std::move(sim);
    json scal;
    scal["kind"] = c.scaling.kind;
    scal["gamma1_ref"] = c.scaling.gamma1_ref;
    scal["grid"] = c.scaling.grid;
    j["scaling"] = std::move(scal);
    j["density"] = json{{"n_bins", c.density.n_bins}, {"y_max", c.density.y_max}};
    json mom;
    mom["order"] = c.moments.order;
    mom["t"] = c.moments.t;
    mom["n_replicas"] = c.moments.n_replicas;
    mom["grid"] = c.moments.grid;
    j["moments"] = std::move(mom);
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["out_dir"] = c.out_dir;
    return j.dump(2) + "\n";
}

ExperimentConfig load_config_file(const std::string& path) {
    return parse_config(read_file(path));
}

std::string config_hash(const ExperimentConfig& cfg) {
    const std::string text = render_config(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

BurstRate build_rate(const RateConfig& cfg) {
    if (cfg.kind == "constant") return BurstRate::constant(cfg.value);
    return BurstRate::hill(cfg.phi0, cfg.K, cfg.A, cfg.B, cfg.n);
}

JumpDensity build_burst(const BurstConfig& cfg) {
    if (cfg.kind == "exponential") return JumpDensity::exponential(cfg.mean);
    return JumpDensity::tabulated(cfg.dy, cfg.pdf);
}

Model2D build_model(const ModelConfig& cfg) {
    ModelParams p;
    p.gamma1 = cfg.gamma1;
    p.gamma2 = cfg.gamma2;
    p.lambda2 = cfg.lambda2;
    p.validate();
    return Model2D{p, build_rate(cfg.rate), build_burst(cfg.burst)};
}

ScalingFamily build_scaling(const ExperimentConfig& cfg) {
    ModelConfig ref = cfg.model;
    ref.gamma1 = cfg.scaling.gamma1_ref;
    return ScalingFamily{scaling_kind_from_string(cfg.scaling.kind), build_model(ref),
                         cfg.scaling.gamma1_ref};
}

} // namespace burstpdmp
