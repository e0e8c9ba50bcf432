#include "burstpdmp/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "burstpdmp/errors.hpp"
#include "burstpdmp/parallel.hpp"
#include "burstpdmp/simulator.hpp"

namespace burstpdmp {
namespace {

void require_constant_rate(const Model2D& model) {
    if (!model.rate.is_constant()) {
        throw unsupported_closure_error(
            "moment equations close only for constant burst rates; state-dependent rates need "
            "the Monte Carlo estimators (estimate_moments_mc)");
    }
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

}  // namespace

MomentVector initial_moments(const State2D& s0, int K) {
    if (K < 1) throw config_error("moments: order must be >= 1");
    MomentVector m;
    m.t = s0.t;
    m.mu.resize(static_cast<std::size_t>(K) + 2);
    m.nu.resize(static_cast<std::size_t>(K) + 1);
    double xk = 1.0;
    for (int k = 0; k <= K + 1; ++k) {
        m.mu[static_cast<std::size_t>(k)] = xk;
        if (k <= K) m.nu[static_cast<std::size_t>(k)] = s0.y * xk;
        xk *= s0.x;
    }
    return m;
}

MomentVector moment_ode_rhs(const MomentVector& m, const Model2D& model) {
    require_constant_rate(model);
    model.params.validate();
    const int K = m.order();
    if (K < 1 || m.mu.size() != static_cast<std::size_t>(K) + 2)
        throw config_error("moment_ode_rhs: mu must extend one order past nu");
    const double phi = model.rate.constant_value();
    const double g1 = model.params.gamma1, g2 = model.params.gamma2,
                 l2 = model.params.lambda2;

    MomentVector d;
    d.t = m.t;
    d.mu.assign(m.mu.size(), 0.0);
    d.nu.assign(m.nu.size(), 0.0);
    for (int k = 1; k <= K + 1; ++k) {
        double burst = 0.0;
        for (int i = 0; i < k; ++i)
            burst += binom(k, i) * m.mu[static_cast<std::size_t>(i)] * model.burst.moment(k - i);
        d.mu[static_cast<std::size_t>(k)] =
            -g1 * k * m.mu[static_cast<std::size_t>(k)] + phi * burst;
    }
    d.nu[0] = -g2 * m.nu[0] + l2 * m.mu[1];
    for (int k = 1; k <= K; ++k) {
        double burst = 0.0;
        for (int i = 0; i < k; ++i)
            burst += binom(k, i) * m.nu[static_cast<std::size_t>(i)] * model.burst.moment(k - i);
        d.nu[static_cast<std::size_t>(k)] =
            -(g1 * k + g2) * m.nu[static_cast<std::size_t>(k)] +
            l2 * m.mu[static_cast<std::size_t>(k) + 1] + phi * burst;
    }
    return d;
}

MomentVector integrate_moments(const MomentVector& m0, double horizon, const Model2D& model,
                               const OdeOptions& opt) {
    require_constant_rate(model);
    if (!(horizon >= 0.0)) throw config_error("integrate_moments: horizon must be nonnegative");
    const int K = m0.order();
    const std::size_t nmu = m0.mu.size(), nnu = m0.nu.size();

    // pack [mu_1 .. mu_{K+1}, nu_0 .. nu_K]; mu_0 = 1 is constant
    std::vector<double> y(nmu - 1 + nnu);
    std::copy(m0.mu.begin() + 1, m0.mu.end(), y.begin());
    std::copy(m0.nu.begin(), m0.nu.end(), y.begin() + static_cast<long>(nmu) - 1);

    MomentVector work = m0;
    auto rhs = [&](double, const std::vector<double>& s, std::vector<double>& ds) {
        std::copy(s.begin(), s.begin() + static_cast<long>(nmu) - 1, work.mu.begin() + 1);
        std::copy(s.begin() + static_cast<long>(nmu) - 1, s.end(), work.nu.begin());
        const MomentVector d = moment_ode_rhs(work, model);
        std::copy(d.mu.begin() + 1, d.mu.end(), ds.begin());
        std::copy(d.nu.begin(), d.nu.end(), ds.begin() + static_cast<long>(nmu) - 1);
    };
    const std::vector<double> yf = integrate_rk45(rhs, std::move(y), 0.0, horizon, opt);

    MomentVector out = m0;
    out.t = m0.t + horizon;
    std::copy(yf.begin(), yf.begin() + static_cast<long>(nmu) - 1, out.mu.begin() + 1);
    std::copy(yf.begin() + static_cast<long>(nmu) - 1, yf.end(), out.nu.begin());
    (void)K;
    return out;
}

MomentVector stationary_moments(const Model2D& model, int K) {
    require_constant_rate(model);
    model.params.validate();
    if (K < 1) throw config_error("stationary_moments: order must be >= 1");
    const double phi = model.rate.constant_value();
    const double g1 = model.params.gamma1, g2 = model.params.gamma2,
                 l2 = model.params.lambda2;

    MomentVector m;
    m.mu.resize(static_cast<std::size_t>(K) + 2);
    m.nu.resize(static_cast<std::size_t>(K) + 1);
    m.mu[0] = 1.0;
    for (int k = 1; k <= K + 1; ++k) {
        double burst = 0.0;
        for (int i = 0; i < k; ++i)
            burst += binom(k, i) * m.mu[static_cast<std::size_t>(i)] * model.burst.moment(k - i);
        m.mu[static_cast<std::size_t>(k)] = phi * burst / (g1 * static_cast<double>(k));
    }
    m.nu[0] = l2 * m.mu[1] / g2;
    for (int k = 1; k <= K; ++k) {
        double burst = 0.0;
        for (int i = 0; i < k; ++i)
            burst += binom(k, i) * m.nu[static_cast<std::size_t>(i)] * model.burst.moment(k - i);
        m.nu[static_cast<std::size_t>(k)] =
            (l2 * m.mu[static_cast<std::size_t>(k) + 1] + phi * burst) /
            (g1 * static_cast<double>(k) + g2);
    }
    m.t = std::numeric_limits<double>::infinity();
    return m;
}

MomentEstimate estimate_moments_mc(const Model2D& model, const State2D& s0, double t, int K,
                                   std::size_t n_replicas, std::uint64_t seed,
                                   std::uint64_t stream_offset, int threads) {
    if (K < 1) throw config_error("estimate_moments_mc: order must be >= 1");
    if (n_replicas < 2) throw config_error("estimate_moments_mc: need >= 2 replicas");
    model.params.validate();

    const std::size_t n_mu = static_cast<std::size_t>(K) + 2;
    const std::size_t n_nu = static_cast<std::size_t>(K) + 1;
    // per-replica terminal states, deterministic by stream id
    std::vector<double> xs(n_replicas), ys(n_replicas);
    parallel_for_index(n_replicas, threads, [&](std::size_t i) {
        RngStream rng(seed, stream_offset + i);
        SimulateOptions opts;
        opts.record_jumps = false;
        const TrajectorySample traj = simulate(s0, t, model, rng, opts);
        xs[i] = traj.final_state.x;
        ys[i] = traj.final_state.y;
    });

    MomentEstimate est;
    est.t = s0.t + t;
    est.n_replicas = n_replicas;
    est.mu.assign(n_mu, 0.0);
    est.mu_se.assign(n_mu, 0.0);
    est.nu.assign(n_nu, 0.0);
    est.nu_se.assign(n_nu, 0.0);
    est.mu[0] = 1.0;

    std::vector<double> work(n_replicas);
    const double n = static_cast<double>(n_replicas);
    auto accumulate = [&](auto&& f, double& out_mean, double& out_se) {
        for (std::size_t i = 0; i < n_replicas; ++i) work[i] = f(xs[i], ys[i]);
        const MeanVar mv = mean_var(work);
        out_mean = mv.mean;
        out_se = std::sqrt(mv.var / n);
    };
    for (int k = 1; k <= K + 1; ++k) {
        accumulate([k](double x, double) { return std::pow(x, k); },
                   est.mu[static_cast<std::size_t>(k)], est.mu_se[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k <= K; ++k) {
        accumulate([k](double x, double y) { return y * std::pow(x, k); },
                   est.nu[static_cast<std::size_t>(k)], est.nu_se[static_cast<std::size_t>(k)]);
    }
    return est;
}

const MomentScaling& ScalingReport::find(const std::string& name) const {
    for (const auto& m : moments) {
        if (m.name == name) return m;
    }
    throw config_error("ScalingReport: no moment named '" + name + "'");
}

ScalingReport fit_scaling_exponents(const ScalingFamily& fam,
                                    const std::vector<double>& gamma1_grid, int K, double t,
                                    std::size_t n_replicas, std::uint64_t seed, int threads) {
    if (gamma1_grid.size() < 3)
        throw config_error("fit_scaling_exponents: need at least 3 gamma1 grid points");
    const auto [lo, hi] = std::minmax_element(gamma1_grid.begin(), gamma1_grid.end());
    if (!(*lo > 0.0)) throw config_error("fit_scaling_exponents: gamma1 grid must be positive");
    if (*hi / *lo < 100.0)
        throw config_error("fit_scaling_exponents: gamma1 grid must span at least two decades");
    if (n_replicas < 8)
        throw config_error("fit_scaling_exponents: need >= 8 replicas per grid point");
    if (!(t > 0.0)) throw config_error("fit_scaling_exponents: evaluation time must be positive");

    ScalingReport report;
    report.gamma1_grid = gamma1_grid;
    report.t = t;
    report.n_replicas = n_replicas;

    std::vector<MomentEstimate> ests;
    ests.reserve(gamma1_grid.size());
    for (std::size_t gi = 0; gi < gamma1_grid.size(); ++gi) {
        const Model2D m = fam.instantiate(gamma1_grid[gi]);
        // disjoint stream blocks per grid point keep replicas independent
        ests.push_back(estimate_moments_mc(m, State2D{}, t, K, n_replicas, seed,
                                           gi * n_replicas, threads));
    }

    auto add = [&](const std::string& name, auto&& get_val, auto&& get_se) {
        MomentScaling ms;
        ms.name = name;
        std::vector<double> rel(gamma1_grid.size());
        for (std::size_t i = 0; i < gamma1_grid.size(); ++i) {
            const double v = get_val(ests[i]);
            const double se = get_se(ests[i]);
            ms.estimates.push_back(v);
            ms.std_errors.push_back(se);
            rel[i] = (v > 0.0) ? se / v : 1.0;
        }
        bool positive = std::all_of(ms.estimates.begin(), ms.estimates.end(),
                                    [](double v) { return v > 0.0; });
        if (positive) {
            const PowerLawFit f = fit_power_law(gamma1_grid, ms.estimates, rel);
            ms.exponent = f.exponent;
            ms.exponent_se = f.exponent_se;
            ms.plain_slope = f.plain_slope;
            ms.plain_slope_se = f.plain_slope_se;
            ms.classification = std::abs(ms.exponent) < 0.3 ? "bounded" : "power-law";
        } else {
            ms.classification = "indeterminate";
        }
        report.moments.push_back(std::move(ms));
    };

    for (int k = 1; k <= K; ++k) {
        add("mu" + std::to_string(k),
            [k](const MomentEstimate& e) { return e.mu[static_cast<std::size_t>(k)]; },
            [k](const MomentEstimate& e) { return e.mu_se[static_cast<std::size_t>(k)]; });
    }
    for (int k = 0; k <= K; ++k) {
        add("nu" + std::to_string(k),
            [k](const MomentEstimate& e) { return e.nu[static_cast<std::size_t>(k)]; },
            [k](const MomentEstimate& e) { return e.nu_se[static_cast<std::size_t>(k)]; });
    }
    return report;
}

}  // namespace burstpdmp
