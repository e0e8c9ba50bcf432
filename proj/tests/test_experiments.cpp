#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "burstpdmp/config.hpp"
#include "burstpdmp/csv.hpp"
#include "burstpdmp/errors.hpp"
#include "burstpdmp/experiments.hpp"

using namespace burstpdmp;
namespace fs = std::filesystem;

namespace {

// unique scratch directory per test case, removed on destruction
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("burstpdmp_test_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};

ExperimentConfig tiny_sim_config(const std::string& out_dir) {
    ExperimentConfig cfg = default_config();
    cfg.sim.horizon = 2.0;
    cfg.sim.obs_dt = 0.5;
    cfg.sim.n_replicas = 2;
    cfg.threads = 1;
    cfg.out_dir = out_dir;
    return cfg;
}

}  // namespace

TEST_CASE("auto rules for burn-in, window and domain size") {
    ExperimentConfig cfg = default_config();

    SimConfig sim;
    sim.burn_in = -1.0;
    CHECK(resolve_burn_in(sim, ModelParams{10.0, 1.0, 2.0}) == doctest::Approx(20.0));
    CHECK(resolve_burn_in(sim, ModelParams{0.1, 1.0, 2.0}) == doctest::Approx(200.0));
    sim.burn_in = 7.5;
    CHECK(resolve_burn_in(sim, ModelParams{10.0, 1.0, 2.0}) == 7.5);

    sim.window = -1.0;
    const BurstRate rate = BurstRate::constant(5.0);
    // 4 expected jumps per sample at the majorant rate
    CHECK(resolve_window(sim, rate, 1000) == doctest::Approx(4.0 * 1000.0 / 5.0));
    sim.window = 123.0;
    CHECK(resolve_window(sim, rate, 1000) == 123.0);

    // y_max: analytic tail cutoff for the exponential default
    cfg.density.y_max = 0.0;
    const Model2D m = build_model(cfg.model);
    const double auto_ymax = resolve_y_max(cfg, m);
    CHECK(auto_ymax > 10.0);
    CHECK(auto_ymax < 60.0);
    cfg.density.y_max = 9.0;
    CHECK(resolve_y_max(cfg, m) == 9.0);
}

TEST_CASE("simulate writes one trajectory per replica plus a manifest") {
    TempDir tmp("simulate");
    const ExperimentConfig cfg = tiny_sim_config(tmp.str());
    const RunResult res = cmd_simulate(cfg);

    CHECK(res.out_dir == tmp.str());
    REQUIRE(res.outputs.size() == 2);
    for (const auto& name : res.outputs) {
        const fs::path p = tmp.path / name;
        REQUIRE(fs::exists(p));
        const std::string text = read_file(p.string());
        CHECK(text.rfind("t,x,y,event", 0) == 0);
        // observation grid: horizon 2, obs_dt 0.5 -> at least 5 obs rows
        CHECK(std::count(text.begin(), text.end(), '\n') >= 6);
    }

    REQUIRE(fs::exists(res.manifest_path));
    const auto manifest = nlohmann::json::parse(read_file(res.manifest_path));
    CHECK(manifest.at("tool") == "burstpdmp");
    CHECK(manifest.at("command") == "simulate");
    CHECK(manifest.at("seed") == cfg.seed);
    CHECK(manifest.at("config_hash") == config_hash(cfg));
    CHECK(manifest.at("outputs").size() == res.outputs.size());
    CHECK(manifest.contains("created_utc"));
    CHECK(manifest.contains("timings"));

    // the embedded config reparses to the exact input
    CHECK(parse_config(manifest.at("config").dump()) == cfg);
}

TEST_CASE("zero horizon produces header-only trajectories") {
    TempDir tmp("zerohorizon");
    ExperimentConfig cfg = tiny_sim_config(tmp.str());
    cfg.sim.horizon = 0.0;
    cfg.sim.n_replicas = 1;
    const RunResult res = cmd_simulate(cfg);
    REQUIRE(res.outputs.size() == 1);
    CHECK(read_file((tmp.path / res.outputs[0]).string()) == "t,x,y,event\n");
}

TEST_CASE("rerunning the same config reproduces CSV bytes") {
    TempDir tmp1("rerun_a"), tmp2("rerun_b");
    ExperimentConfig a = tiny_sim_config(tmp1.str());
    ExperimentConfig b = tiny_sim_config(tmp2.str());
    const RunResult ra = cmd_simulate(a);
    const RunResult rb = cmd_simulate(b);
    REQUIRE(ra.outputs == rb.outputs);
    for (std::size_t i = 0; i < ra.outputs.size(); ++i) {
        CHECK(read_file((tmp1.path / ra.outputs[i]).string()) ==
              read_file((tmp2.path / rb.outputs[i]).string()));
    }

    // manifest round trip: parse the manifest as a config, run again
    TempDir tmp3("rerun_c");
    ExperimentConfig c = parse_config(read_file(ra.manifest_path));
    CHECK(c == a);
    c.out_dir = tmp3.str();
    const RunResult rc = cmd_simulate(c);
    for (std::size_t i = 0; i < ra.outputs.size(); ++i) {
        CHECK(read_file((tmp1.path / ra.outputs[i]).string()) ==
              read_file((tmp3.path / rc.outputs[i]).string()));
    }
}

TEST_CASE("reduce in the S1 family integrates the rate equation") {
    TempDir tmp("reduce_s1");
    ExperimentConfig cfg = tiny_sim_config(tmp.str());
    cfg.scaling.kind = "S1";
    cfg.sim.horizon = 5.0;
    cfg.sim.obs_dt = 1.0;
    const RunResult res = cmd_reduce(cfg);
    REQUIRE(res.outputs.size() == 1);
    CHECK(res.outputs[0] == "reduced_ode.csv");
    const std::string text = read_file((tmp.path / res.outputs[0]).string());
    CHECK(text.rfind("t,y,event", 0) == 0);
    // accepted integrator steps from t = 0 to the horizon, all observations
    CHECK(std::count(text.begin(), text.end(), '\n') >= 3);
    CHECK(text.find("\n0,0,obs\n") != std::string::npos);
    CHECK(text.find(",obs\n") != std::string::npos);
    CHECK(text.find(",jump\n") == std::string::npos);
}

TEST_CASE("reduce in the S2 family simulates the limit jump process") {
    TempDir tmp("reduce_s2");
    ExperimentConfig cfg = tiny_sim_config(tmp.str());
    cfg.scaling.kind = "S2";
    cfg.sim.n_replicas = 2;
    const RunResult res = cmd_reduce(cfg);
    REQUIRE(res.outputs.size() == 2);
    for (const auto& name : res.outputs) {
        const std::string text = read_file((tmp.path / name).string());
        CHECK(text.rfind("t,y,event", 0) == 0);
    }
    const auto manifest = nlohmann::json::parse(read_file(res.manifest_path));
    CHECK(manifest.at("hbar_mean").get<double>() == doctest::Approx(1.0));
}

TEST_CASE("moments command writes the scaling table") {
    TempDir tmp("moments");
    ExperimentConfig cfg = default_config();
    cfg.out_dir = tmp.str();
    cfg.threads = 1;
    cfg.moments.order = 1;
    cfg.moments.t = 2.0;
    cfg.moments.n_replicas = 64;
    cfg.moments.grid = {1.0, 10.0, 100.0};
    const RunResult res = cmd_moments(cfg);
    REQUIRE(res.outputs.size() == 1);
    CHECK(res.outputs[0] == "moment_scaling.csv");
    const std::string text = read_file((tmp.path / res.outputs[0]).string());
    CHECK(text.rfind("gamma1,moment_name,estimate,stderr", 0) == 0);
    // 3 grid points x (mu1, nu0, nu1) = 9 data rows
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);

    const auto manifest = nlohmann::json::parse(read_file(res.manifest_path));
    CHECK(manifest.contains("slopes"));
    CHECK(manifest.at("slopes").size() == 3);  // mu1, nu0, nu1
}

TEST_CASE("moments with a constant rate also reports the closed-form stationary values") {
    TempDir tmp("moments_const");
    ExperimentConfig cfg = default_config();
    cfg.out_dir = tmp.str();
    cfg.threads = 1;
    cfg.model.rate.kind = "constant";
    cfg.model.rate.value = 2.0;
    cfg.moments.order = 1;
    cfg.moments.t = 2.0;
    cfg.moments.n_replicas = 64;
    cfg.moments.grid = {1.0, 10.0, 100.0};
    const RunResult res = cmd_moments(cfg);
    const auto manifest = nlohmann::json::parse(read_file(res.manifest_path));
    CHECK(manifest.contains("closed_moments"));
}

TEST_CASE("density sweep emits histograms, analytic laws and distances") {
    TempDir tmp("density");
    ExperimentConfig cfg = default_config();
    cfg.out_dir = tmp.str();
    cfg.threads = 1;
    cfg.sim.n_samples = 4000;
    cfg.density.n_bins = 40;
    cfg.scaling.grid = {1.0, 10.0};
    const RunResult res = cmd_density(cfg);

    REQUIRE(res.outputs.size() == 5);  // 2 mc + 2 analytic + distances
    CHECK(std::count(res.outputs.begin(), res.outputs.end(), "distances.csv") == 1);
    for (const auto& name : res.outputs) {
        const std::string text = read_file((tmp.path / name).string());
        if (name == "distances.csv") {
            CHECK(text.rfind("gamma1,norm,value", 0) == 0);
            CHECK(std::count(text.begin(), text.end(), '\n') == 7);  // 2 gammas x 3 norms
        } else {
            CHECK(text.rfind("y_left,y_right,value", 0) == 0);
            CHECK(std::count(text.begin(), text.end(), '\n') == 41);
        }
    }

    const auto manifest = nlohmann::json::parse(read_file(res.manifest_path));
    CHECK(manifest.contains("distances"));
    CHECK(manifest.contains("sampling_protocol"));
    const auto resolved = manifest.at("resolved");
    CHECK(resolved.at("y_max").get<double>() > 0.0);
}

TEST_CASE("selfcheck passes at default tolerances and reports failures") {
    SelfCheckOptions opt;
    const SelfCheckReport ok = run_selfcheck(opt);
    CHECK(ok.passed);
    CHECK(ok.text.find("[PASS] flow-exactness") != std::string::npos);
    CHECK(ok.text.find("[PASS] thinning-ks") != std::string::npos);
    CHECK(ok.text.find("[FAIL]") == std::string::npos);

    opt.flow_tol = 1e-16;  // below double roundoff: must fail
    const SelfCheckReport bad = run_selfcheck(opt);
    CHECK_FALSE(bad.passed);
    CHECK(bad.text.find("[FAIL] flow-exactness") != std::string::npos);
}

TEST_CASE("threads resolution prefers config over environment") {
    ExperimentConfig cfg = default_config();
    cfg.threads = 3;
    CHECK(resolve_threads_setting(cfg) == 3);

    cfg.threads = 0;
    ::setenv("BURSTPDMP_THREADS", "2", 1);
    CHECK(resolve_threads_setting(cfg) == 2);
    ::setenv("BURSTPDMP_THREADS", "garbage", 1);
    CHECK_THROWS_AS(resolve_threads_setting(cfg), config_error);
    ::unsetenv("BURSTPDMP_THREADS");
    CHECK(resolve_threads_setting(cfg) >= 1);
}

TEST_CASE("command validation surfaces config errors") {
    TempDir tmp("badcfg");
    ExperimentConfig cfg = tiny_sim_config(tmp.str());
    cfg.sim.horizon = -1.0;
    CHECK_THROWS_AS(cmd_simulate(cfg), config_error);

    ExperimentConfig bad_obs = tiny_sim_config(tmp.str());
    bad_obs.sim.obs_dt = 0.0;
    CHECK_THROWS_AS(cmd_simulate(bad_obs), config_error);

    ExperimentConfig bad_rep = tiny_sim_config(tmp.str());
    bad_rep.sim.n_replicas = 0;
    CHECK_THROWS_AS(cmd_simulate(bad_rep), config_error);
}
