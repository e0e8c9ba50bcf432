#include <doctest.h>

#include <string>
#include <vector>

#include "burstpdmp/config.hpp"
#include "burstpdmp/errors.hpp"
#include "burstpdmp/rng.hpp"

using namespace burstpdmp;

TEST_CASE("default config builds a valid model") {
    const ExperimentConfig cfg = default_config();
    const Model2D m = build_model(cfg.model);
    CHECK(m.params.gamma1 == 10.0);
    CHECK(m.params.gamma2 == 1.0);
    CHECK(m.params.lambda2 == 2.0);
    CHECK(m.rate.kind() == BurstRate::Kind::Hill);
    CHECK(m.rate.upper_bound() == doctest::Approx(5.0));
    CHECK(m.burst.exponential_mean() == doctest::Approx(5.0));
    // b = gamma1 / 2 and lambda2 = 2: the reduced burst mean is exactly 1
    CHECK(m.burst.mean() * m.params.lambda2 / m.params.gamma1 == doctest::Approx(1.0));

    const ScalingFamily fam = build_scaling(cfg);
    CHECK(fam.kind == ScalingKind::S2);
    CHECK(fam.gamma1_ref == 10.0);
}

TEST_CASE("render/parse round trip preserves every field") {
    ExperimentConfig cfg = default_config();
    cfg.model.gamma1 = 3.5;
    cfg.model.gamma2 = 0.25;
    cfg.model.lambda2 = 7.0;
    cfg.model.rate.kind = "constant";
    cfg.model.rate.value = 1.75;
    cfg.model.rate.phi0 = 2.5;
    cfg.model.rate.K = 0.5;
    cfg.model.rate.A = 3.0;
    cfg.model.rate.B = 2.0;
    cfg.model.rate.n = 6.0;
    cfg.initial.x = 0.5;
    cfg.initial.y = 1.5;
    cfg.sim.process = "reduced";
    cfg.sim.horizon = 42.0;
    cfg.sim.obs_dt = 0.125;
    cfg.sim.n_samples = 12345;
    cfg.sim.n_replicas = 9;
    cfg.sim.burn_in = 11.0;
    cfg.sim.window = 505.0;
    cfg.scaling.kind = "S3";
    cfg.scaling.gamma1_ref = 2.0;
    cfg.scaling.grid = {0.5, 5.0, 50.0};
    cfg.density.n_bins = 77;
    cfg.density.y_max = 19.5;
    cfg.moments.order = 3;
    cfg.moments.t = 7.5;
    cfg.moments.n_replicas = 4242;
    cfg.moments.grid = {2.0, 20.0, 200.0};
    cfg.seed = 987654321;
    cfg.threads = 2;
    cfg.out_dir = "elsewhere";

    const ExperimentConfig back = parse_config(render_config(cfg));
    CHECK(back == cfg);

    // tabulated burst survives the round trip too
    cfg.model.burst.kind = "tabulated";
    cfg.model.burst.dy = 0.01;
    cfg.model.burst.pdf = {0.0, 50.0, 100.0, 50.0, 0.0};
    const ExperimentConfig back2 = parse_config(render_config(cfg));
    CHECK(back2 == cfg);
}

TEST_CASE("rendered config is stable and hashable") {
    const ExperimentConfig cfg = default_config();
    CHECK(render_config(cfg) == render_config(cfg));

    const std::string h = config_hash(cfg);
    CHECK(h.size() == 16);
    for (char c : h) CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));

    ExperimentConfig other = cfg;
    other.model.gamma1 = 11.0;
    CHECK(config_hash(other) != h);
}

TEST_CASE("unknown fields are rejected with their path") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"sim": {"n_sample": 10}})"),
                         doctest::Contains("sim.n_sample"), config_error);
    CHECK_THROWS_WITH_AS(parse_config(R"({"modell": {}})"), doctest::Contains("modell"),
                         config_error);
    CHECK_THROWS_WITH_AS(parse_config(R"({"model": {"rate": {"phi": 3}}})"),
                         doctest::Contains("model.rate.phi"), config_error);
}

TEST_CASE("type errors name the offending field") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"model": {"gamma1": "fast"}})"),
                         doctest::Contains("model.gamma1"), config_error);
    CHECK_THROWS_WITH_AS(parse_config(R"({"sim": {"n_replicas": 2.5}})"),
                         doctest::Contains("sim.n_replicas"), config_error);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scaling": {"grid": "dense"}})"),
                         doctest::Contains("scaling.grid"), config_error);
    CHECK_THROWS_AS(parse_config("not json at all"), config_error);
    CHECK_THROWS_AS(parse_config(R"([1, 2, 3])"), config_error);
}

TEST_CASE("partial documents inherit defaults") {
    const ExperimentConfig cfg = parse_config(R"({"model": {"gamma1": 2.5}})");
    ExperimentConfig want = default_config();
    want.model.gamma1 = 2.5;
    CHECK(cfg == want);

    const ExperimentConfig empty = parse_config("{}");
    CHECK(empty == default_config());
}

TEST_CASE("manifests are accepted via their embedded config") {
    ExperimentConfig cfg = default_config();
    cfg.seed = 777;
    const std::string manifest = std::string(R"({"tool": "x", "command": "y", "config": )") +
                                 render_config(cfg) + "}";
    const ExperimentConfig back = parse_config(manifest);
    CHECK(back == cfg);
}

TEST_CASE("build helpers surface validation as config_error") {
    RateConfig bad_rate;
    bad_rate.kind = "hill";
    bad_rate.phi0 = -1.0;
    CHECK_THROWS_AS(build_rate(bad_rate), config_error);

    RateConfig const_rate;
    const_rate.kind = "constant";
    const_rate.value = 3.25;
    const BurstRate r = build_rate(const_rate);
    CHECK(r.constant_value() == 3.25);

    BurstConfig bad_burst;
    bad_burst.kind = "tabulated";
    bad_burst.dy = 0.0;
    CHECK_THROWS_AS(build_burst(bad_burst), config_error);

    ModelConfig bad_model;
    bad_model.gamma1 = 0.0;
    CHECK_THROWS_AS(build_model(bad_model), config_error);

    ExperimentConfig bad_scaling = default_config();
    bad_scaling.scaling.kind = "S9";
    CHECK_THROWS_AS(build_scaling(bad_scaling), config_error);

    // enum-like strings are rejected at parse time with the field path
    CHECK_THROWS_WITH_AS(parse_config(R"({"model": {"rate": {"kind": "sigmoid"}}})"),
                         doctest::Contains("model.rate.kind"), config_error);
    CHECK_THROWS_WITH_AS(parse_config(R"({"model": {"burst": {"kind": "uniform"}}})"),
                         doctest::Contains("model.burst.kind"), config_error);
    CHECK_THROWS_WITH_AS(parse_config(R"({"sim": {"process": "hybrid"}})"),
                         doctest::Contains("sim.process"), config_error);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scaling": {"kind": "S9"}})"),
                         doctest::Contains("scaling.kind"), config_error);
}

TEST_CASE("build_burst constructs a sampling-ready tabulated density") {
    BurstConfig tab;
    tab.kind = "tabulated";
    tab.dy = 0.5;
    tab.pdf = {0.0, 1.0, 1.0, 0.0};  // trapezoid mass = 0.5*(0.5+1+0.5) = 1
    const JumpDensity h = build_burst(tab);
    CHECK_FALSE(h.is_exponential());
    CHECK(h.grid_dy() == 0.5);
    RngStream rng(1, 0);
    for (int i = 0; i < 100; ++i) {
        const double x = h.sample(rng);
        CHECK(x >= 0.0);
        CHECK(x <= 1.5);
    }
}
