#include <doctest.h>

#include <cmath>
#include <vector>

#include "burstpdmp/density.hpp"
#include "burstpdmp/errors.hpp"
#include "burstpdmp/model.hpp"
#include "burstpdmp/quadrature.hpp"
#include "burstpdmp/reduced.hpp"

using namespace burstpdmp;

namespace {

ReducedJumpModel gamma_model() {
    // phi = 2, gamma2 = 1, hbar = Exp(0.8): stationary Gamma(2, 0.8)
    const Model2D m{{1.0, 1.0, 2.0}, BurstRate::constant(2.0), JumpDensity::exponential(0.4)};
    return make_reduced_jump_model(m);
}

ReducedJumpModel fig_reduced() {
    // hill(5, 1, 4, 1, 4), gamma2 = 1, hbar = Exp(1)
    const Model2D m{{10.0, 1.0, 2.0}, BurstRate::hill(5.0, 1.0, 4.0, 1.0, 4.0),
                    JumpDensity::exponential(5.0)};
    return make_reduced_jump_model(m);
}

}  // namespace

TEST_CASE("histogram hand-checked case with tail tracking") {
    const std::vector<double> xs = {0.1, 0.3, 0.9};
    const DensityGrid g = histogram(xs, 2, 1.0);
    CHECK(g.n_bins() == 2);
    CHECK(g.dy() == doctest::Approx(0.5));
    CHECK(g.values[0] == doctest::Approx(4.0 / 3));
    CHECK(g.values[1] == doctest::Approx(2.0 / 3));
    CHECK(g.tail_mass == 0.0);
    CHECK(g.integral() == doctest::Approx(1.0));
    CHECK(g.center(0) == doctest::Approx(0.25));

    // sample at y_max falls in the tail
    const std::vector<double> with_tail = {0.1, 0.3, 0.9, 1.0, 7.0};
    const DensityGrid h = histogram(with_tail, 2, 1.0);
    CHECK(h.tail_mass == doctest::Approx(0.4));
    CHECK(h.integral() == doctest::Approx(0.6));
}

TEST_CASE("histogram validation and degenerate input") {
    const std::vector<double> xs = {0.5, 2.0};
    CHECK_THROWS_AS(histogram(xs, 0, 1.0), config_error);
    CHECK_THROWS_AS(histogram(xs, 4, 0.0), config_error);
    CHECK_THROWS_AS(histogram(std::vector<double>{}, 4, 1.0), config_error);
    CHECK_THROWS_AS(histogram(std::vector<double>{-0.1, 0.5}, 4, 1.0), config_error);
    CHECK_THROWS_AS(histogram(std::vector<double>{5.0, 6.0}, 4, 1.0), numeric_error);
}

TEST_CASE("normalize rescales to unit mass") {
    DensityGrid g;
    g.y_max = 2.0;
    g.values = {1.0, 3.0, 0.0, 0.0};
    g.tail_mass = 0.25;
    g.normalize();
    CHECK(g.integral() == doctest::Approx(1.0));
    CHECK(g.tail_mass == 0.0);

    DensityGrid z;
    z.y_max = 1.0;
    z.values = {0.0, 0.0};
    CHECK_THROWS_AS(z.normalize(), numeric_error);
}

TEST_CASE("constant-rate stationary law is the gamma distribution") {
    const StationaryLaw law = analytic_stationary(gamma_model());
    CHECK(law.y_exponent() == doctest::Approx(1.0));  // shape 2 => y^1
    CHECK(law.structure_exponent() == 0.0);
    CHECK(law.burst_mean() == doctest::Approx(0.8));

    // Gamma(2, 0.8) pdf reference values
    const double ys[] = {0.1, 0.5, 1.0, 2.0, 4.0};
    const double ref[] = {0.13789014102884303, 0.41817299103046107, 0.44766374509404694,
                          0.2565156206996837, 0.04211216874428416};
    for (int i = 0; i < 5; ++i)
        CHECK(law.pdf(ys[i]) == doctest::Approx(ref[i]).epsilon(1e-10));

    CHECK(law.moment(1) == doctest::Approx(1.6).epsilon(1e-8));
    CHECK(law.moment(2) == doctest::Approx(3.84).epsilon(1e-8));
    CHECK(law.pdf(0.0) == 0.0);
    CHECK(law.pdf(-1.0) == 0.0);
}

TEST_CASE("hill stationary law: exponents, normalization, moment identity") {
    const StationaryLaw law = analytic_stationary(fig_reduced());
    CHECK(law.y_exponent() == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(law.structure_exponent() == doctest::Approx(0.9375).epsilon(1e-12));
    CHECK(law.burst_mean() == doctest::Approx(1.0));

    // independently computed normalization and mean
    CHECK(law.normalization() * 27.086064318164357 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(law.moment(1) == doctest::Approx(4.561334987207028).epsilon(1e-9));

    // stationarity forces gamma2 E[Y] = bb E[phi(Y)]
    auto f = [&](double y) { return law.rate().eval(y) * law.pdf(y); };
    const double mean_rate = integrate(f, 0.0, 60.0, 1e-11).value;
    CHECK(law.gamma2() * law.moment(1) ==
          doctest::Approx(law.burst_mean() * mean_rate).epsilon(1e-8));

    // pdf integrates to one
    auto p = [&](double y) { return law.pdf(y); };
    CHECK(integrate(p, 0.0, 60.0, 1e-11).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stationary law solves its own equation pointwise") {
    const ReducedJumpModel m = fig_reduced();
    const StationaryLaw law = analytic_stationary(m);
    double max_pdf = 0.0;
    for (double y : {0.5, 1.0, 2.0, 3.0, 4.5, 6.0, 8.0, 12.0})
        max_pdf = std::max(max_pdf, law.pdf(y));
    for (double y : {0.5, 1.0, 2.0, 3.0, 4.5, 6.0, 8.0, 12.0})
        CHECK(std::abs(stationary_residual(law, m, y)) <= 1e-6 * max_pdf);

    // same for the gamma special case
    const ReducedJumpModel g = gamma_model();
    const StationaryLaw gl = analytic_stationary(g);
    for (double y : {0.2, 0.8, 1.6, 3.0})
        CHECK(std::abs(stationary_residual(gl, g, y)) <= 1e-6 * gl.pdf(0.8));
}

TEST_CASE("tail cutoff brackets the requested mass") {
    const StationaryLaw law = analytic_stationary(fig_reduced());
    const double cut = law.tail_cutoff(1e-6);
    CHECK(cut == doctest::Approx(23.286958815834566).epsilon(2e-3));
    CHECK(law.tail_mass_beyond(cut) <= 1e-6);
    CHECK(law.tail_mass_beyond(cut * 0.98) > 1e-6);
    CHECK(law.tail_mass_beyond(0.0) == 1.0);
    CHECK_THROWS_AS(law.tail_cutoff(0.0), config_error);
    CHECK_THROWS_AS(law.tail_cutoff(1.0), config_error);
}

TEST_CASE("bin-averaged law carries its tail and unit total mass") {
    const StationaryLaw law = analytic_stationary(fig_reduced());
    const DensityGrid g = law.bin_average(128, 12.0);
    CHECK(g.n_bins() == 128);
    CHECK(g.integral() + g.tail_mass == doctest::Approx(1.0).epsilon(1e-8));
    // cell averages bracket the pdf extrema within each cell (monotone check
    // at the resolution level: average within [min, max] over the cell)
    for (int i = 0; i < g.n_bins(); i += 16) {
        const double lo = i * g.dy(), hi = lo + g.dy();
        const double a = law.pdf(lo + 1e-12), b = law.pdf(hi);
        const double vmin = std::min(a, b) * 0.9, vmax = std::max(a, b) * 1.1 + 1e-12;
        CHECK(g.values[i] >= vmin * 0.9);
        CHECK(g.values[i] <= vmax * 1.1);
    }
}

TEST_CASE("analytic law requires an exponential burst density") {
    const double dy = 2.0 / 64;
    std::vector<double> vals(65);
    for (int i = 0; i <= 64; ++i) {
        const double x = i * dy;
        vals[i] = x <= 1.0 ? x : 2.0 - x;
    }
    const ReducedJumpModel m{1.0, BurstRate::constant(2.0), JumpDensity::tabulated(dy, vals)};
    CHECK_THROWS_AS(analytic_stationary(m), config_error);
}

TEST_CASE("pde conserves mass and stays near the analytic fixed point") {
    const ReducedJumpModel m = gamma_model();
    const StationaryLaw law = analytic_stationary(m);
    // hbar mean 0.8 needs dy <= 0.04: 640 cells over [0, 16]
    const DensityGrid v0 = law.bin_average(640, 16.0);
    PdeOptions opt;
    opt.snapshot_times = {0.0, 0.5};
    const PdeResult res = solve_density_pde(v0, 1.0, m, opt);
    CHECK(res.mass_error < 1e-10);
    CHECK(res.steps > 10);
    CHECK(res.dt_used > 0.0);
    CHECK_FALSE(res.dt_reduced);
    REQUIRE(res.snapshots.size() == 2);
    CHECK(res.snapshots[0].values == v0.values);

    // starting on the stationary law, the solution moves only by the O(dy)
    // discretization error
    const double drift = density_distance(res.final, v0, DistanceNorm::L1);
    CHECK(drift < 0.05);
}

TEST_CASE("pde advects a pure-decay profile exactly up to first order") {
    // with a negligible burst rate the equation reduces to dv/dt = d(y v)/dy,
    // whose solution is v(t, y) = e^t v0(y e^t) for gamma2 = 1
    const ReducedJumpModel m{1.0, BurstRate::constant(1e-12), JumpDensity::exponential(1.0)};
    const int n = 400;
    const double y_max = 16.0;
    DensityGrid v0;
    v0.y_max = y_max;
    v0.values.resize(n);
    auto bump = [](double y) { return std::exp(-(y - 5.0) * (y - 5.0) / (2.0 * 0.8 * 0.8)); };
    for (int i = 0; i < n; ++i) v0.values[i] = bump(v0.center(i));
    v0.normalize();

    const double t = 0.5;
    const PdeResult res = solve_density_pde(v0, t, m);
    double linf = 0.0, vmax = 0.0;
    for (int i = 0; i < n; ++i) {
        const double y = res.final.center(i);
        const double c = 1.0 / std::sqrt(2.0 * std::acos(-1.0)) / 0.8;  // v0 normalization
        const double exact = std::exp(t) * c * bump(y * std::exp(t));
        linf = std::max(linf, std::abs(res.final.values[i] - exact));
        vmax = std::max(vmax, exact);
    }
    CHECK(linf < 0.12 * vmax);
    CHECK(res.mass_error < 1e-10);
}

TEST_CASE("pde validation and dt handling") {
    const ReducedJumpModel m = gamma_model();
    const StationaryLaw law = analytic_stationary(m);

    DensityGrid tiny = law.bin_average(3, 16.0);
    CHECK_THROWS_AS(solve_density_pde(tiny, 1.0, m), config_error);

    // 16 cells over [0,16] leaves just one cell per burst mean: rejected
    DensityGrid coarse = law.bin_average(16, 16.0);
    CHECK_THROWS_AS(solve_density_pde(coarse, 1.0, m), config_error);

    DensityGrid v0 = law.bin_average(640, 16.0);
    PdeOptions big_dt;
    big_dt.dt = 1.0;  // far above the CFL bound
    const PdeResult res = solve_density_pde(v0, 0.2, m, big_dt);
    CHECK(res.dt_reduced);
    CHECK(res.dt_used < 1.0);

    PdeOptions bad_snap;
    bad_snap.snapshot_times = {5.0};
    CHECK_THROWS_AS(solve_density_pde(v0, 1.0, m, bad_snap), config_error);
}

TEST_CASE("regrid conserves mass, identity and pairwise coarsening") {
    DensityGrid g;
    g.y_max = 4.0;
    g.values = {0.1, 0.4, 0.3, 0.2, 0.5, 0.25, 0.15, 0.1};
    g.tail_mass = 0.05;

    const DensityGrid same = regrid(g, 8, 4.0);
    for (int i = 0; i < 8; ++i) CHECK(same.values[i] == doctest::Approx(g.values[i]));
    CHECK(same.tail_mass == doctest::Approx(g.tail_mass));

    const DensityGrid half = regrid(g, 4, 4.0);
    for (int i = 0; i < 4; ++i)
        CHECK(half.values[i] == doctest::Approx(0.5 * (g.values[2 * i] + g.values[2 * i + 1])));
    CHECK(half.integral() == doctest::Approx(g.integral()).epsilon(1e-12));

    // shrinking the domain moves mass into the tail
    const DensityGrid cut = regrid(g, 4, 2.0);
    CHECK(cut.integral() + cut.tail_mass ==
          doctest::Approx(g.integral() + g.tail_mass).epsilon(1e-12));
    CHECK(cut.tail_mass > g.tail_mass);

    CHECK_THROWS_AS(regrid(g, 0, 4.0), config_error);
}

TEST_CASE("density distances: axioms and regrid path") {
    DensityGrid a;
    a.y_max = 2.0;
    a.values = {0.5, 0.75, 0.5, 0.25};
    DensityGrid b;
    b.y_max = 2.0;
    b.values = {0.25, 0.5, 0.75, 0.5};

    for (DistanceNorm n : {DistanceNorm::L1, DistanceNorm::L2, DistanceNorm::Linf}) {
        CHECK(density_distance(a, a, n) == 0.0);
        CHECK(density_distance(a, b, n) == doctest::Approx(density_distance(b, a, n)));
        CHECK(density_distance(a, b, n) > 0.0);
    }
    // hand value: |diff| = 0.25 everywhere, dy = 0.5
    CHECK(density_distance(a, b, DistanceNorm::L1) == doctest::Approx(0.5));
    CHECK(density_distance(a, b, DistanceNorm::Linf) == doctest::Approx(0.25));
    CHECK(density_distance(a, b, DistanceNorm::L2) ==
          doctest::Approx(std::sqrt(0.25 * 0.25 * 2.0)));

    DensityGrid fine;
    fine.y_max = 2.0;
    fine.values = {0.5, 0.5, 0.75, 0.75, 0.5, 0.5, 0.25, 0.25};
    CHECK_THROWS_AS(density_distance(a, fine, DistanceNorm::L1), config_error);
    // rebinning the pairwise-constant refinement reproduces a exactly
    CHECK(density_distance(a, fine, DistanceNorm::L1, true) == doctest::Approx(0.0));
}

TEST_CASE("norm strings round trip") {
    for (DistanceNorm n : {DistanceNorm::L1, DistanceNorm::L2, DistanceNorm::Linf})
        CHECK(norm_from_string(to_string(n)) == n);
    CHECK(norm_from_string("L2") == DistanceNorm::L2);
    CHECK_THROWS_AS(norm_from_string("manhattan"), config_error);
}
