#include "burstpdmp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "burstpdmp/errors.hpp"

namespace burstpdmp {

MeanVar mean_var(std::span<const double> xs) {
    MeanVar r;
    r.n = xs.size();
    if (r.n == 0) return r;
    r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double acc = 0.0;
    for (double x : xs) {
        const double d = x - r.mean;
        acc += d * d;
    }
    r.var = acc / static_cast<double>(r.n - 1);
    return r;
}

BatchStats batch_mean_se(std::span<const double> ordered, int n_batches) {
    if (n_batches < 2) throw config_error("batch_mean_se: need at least 2 batches");
    const std::size_t n = ordered.size();
    if (n < static_cast<std::size_t>(2 * n_batches))
        throw config_error("batch_mean_se: too few samples for requested batch count");
    const std::size_t len = n / static_cast<std::size_t>(n_batches);
    std::vector<double> means(static_cast<std::size_t>(n_batches));
    for (int b = 0; b < n_batches; ++b) {
        const auto* p = ordered.data() + static_cast<std::size_t>(b) * len;
        means[static_cast<std::size_t>(b)] =
            std::accumulate(p, p + len, 0.0) / static_cast<double>(len);
    }
    const MeanVar mv = mean_var(means);
    return {mv.mean, std::sqrt(mv.var / static_cast<double>(n_batches)), n_batches};
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                 double alpha) {
    KsResult r;
    r.n = samples.size();
    if (r.n == 0) throw config_error("ks_test: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(r.n);
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max({d, hi, lo});
    }
    r.statistic = d;
    // Kolmogorov asymptotic critical value with the Stephens correction.
    const double c_alpha = std::sqrt(-0.5 * std::log(alpha / 2.0));
    const double sn = std::sqrt(n);
    r.threshold = c_alpha / (sn + 0.12 + 0.11 / sn);
    r.pass = r.statistic <= r.threshold;
    return r;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw config_error("normal_quantile: p outside (0,1)");
    // Acklam's algorithm.
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double q, x;
    if (p < p_low) {
        q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    return x;
}

namespace {

double chi2_quantile(double p, int dof) {
    // Wilson-Hilferty approximation; adequate for test thresholds at dof >= 3.
    const double z = normal_quantile(p);
    const double k = static_cast<double>(dof);
    const double t = 1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k));
    return k * t * t * t;
}

}  // namespace

Chi2Result chi2_poisson_test(std::span<const long> counts, double mean, double alpha) {
    if (counts.empty()) throw config_error("chi2_poisson_test: empty sample");
    if (mean <= 0.0) throw config_error("chi2_poisson_test: mean must be positive");
    const double n = static_cast<double>(counts.size());
    const long k_max_obs = *std::max_element(counts.begin(), counts.end());

    // Expected cell counts n * pmf(k), k = 0..k_hi, with the upper tail folded
    // into the last cell.
    const long k_hi = std::max<long>(k_max_obs, static_cast<long>(mean + 10.0 * std::sqrt(mean)));
    std::vector<double> expected(static_cast<std::size_t>(k_hi) + 1);
    double tail = 1.0;
    for (long k = 0; k <= k_hi; ++k) {
        const double lp = static_cast<double>(k) * std::log(mean) - mean -
                          std::lgamma(static_cast<double>(k) + 1.0);
        expected[static_cast<std::size_t>(k)] = n * std::exp(lp);
        tail -= std::exp(lp);
    }
    expected.back() += n * std::max(tail, 0.0);

    std::vector<double> observed(expected.size(), 0.0);
    for (long c : counts) {
        observed[static_cast<std::size_t>(std::min(c, k_hi))] += 1.0;
    }

    // Merge low-expectation cells into their neighbors from both ends.
    std::vector<double> obs_m, exp_m;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        o_acc += observed[k];
        e_acc += expected[k];
        if (e_acc >= 5.0) {
            obs_m.push_back(o_acc);
            exp_m.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0) {
        if (exp_m.empty()) {
            obs_m.push_back(o_acc);
            exp_m.push_back(e_acc);
        } else {
            obs_m.back() += o_acc;
            exp_m.back() += e_acc;
        }
    }

    Chi2Result r;
    r.dof = static_cast<int>(exp_m.size()) - 1;
    if (r.dof < 1) throw config_error("chi2_poisson_test: not enough cells after merging");
    for (std::size_t i = 0; i < exp_m.size(); ++i) {
        const double d = obs_m[i] - exp_m[i];
        r.statistic += d * d / exp_m[i];
    }
    r.critical = chi2_quantile(1.0 - alpha, r.dof);
    r.pass = r.statistic <= r.critical;
    return r;
}

LineFit wls_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> sigma) {
    if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 2)
        throw config_error("wls_line: need >= 2 points with matching sigmas");
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / (sigma[i] * sigma[i]);
        S += w;
        Sx += w * x[i];
        Sy += w * y[i];
        Sxx += w * x[i] * x[i];
        Sxy += w * x[i] * y[i];
    }
    const double delta = S * Sxx - Sx * Sx;
    if (delta <= 0.0) throw numeric_error("wls_line: degenerate design (identical x values?)");
    LineFit f;
    f.slope = (S * Sxy - Sx * Sy) / delta;
    f.intercept = (Sxx * Sy - Sx * Sxy) / delta;
    f.slope_se = std::sqrt(S / delta);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1.0 / (sigma[i] * sigma[i]);
        const double r = y[i] - f.intercept - f.slope * x[i];
        f.sse += w * r * r;
    }
    return f;
}

PowerLawFit fit_power_law(std::span<const double> g, std::span<const double> values,
                          std::span<const double> rel_se) {
    const std::size_t n = g.size();
    if (n < 3 || values.size() != n || rel_se.size() != n)
        throw config_error("fit_power_law: need >= 3 points with matching uncertainties");
    double g_min = g[0], g_max = g[0];
    std::vector<double> x(n), y(n), sig(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(g[i] > 0.0) || !(values[i] > 0.0))
            throw config_error("fit_power_law: grid and values must be positive");
        g_min = std::min(g_min, g[i]);
        g_max = std::max(g_max, g[i]);
        x[i] = std::log(g[i]);
        y[i] = std::log(values[i]);
        sig[i] = std::max(rel_se[i], 1e-8);  // exact inputs get a uniform tiny weight
    }

    const LineFit plain = wls_line(x, y, sig);

    auto fit_at = [&](double c) {
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = y[i] - std::log1p(c / g[i]);
        return wls_line(x, t, sig);
    };

    // Candidate corrections: mild negative values (data approaching the
    // asymptote from below) plus a log grid of positive ones.  For c beyond
    // the grid, log1p(c/g) ~ log c - log g is collinear with the slope term
    // (shifting the fitted exponent by +1 at identical sse), so the positive
    // scan stops where the correction still bends inside the grid and is
    // negligible at the top point.
    const double c_cap = 0.05 * g_max;
    std::vector<double> cand;
    for (int i = 0; i <= 64; ++i)
        cand.push_back(-0.45 * g_min + (0.45 * g_min) * static_cast<double>(i) / 64.0);
    const double lo = std::log(1e-3 * g_min), hi = std::log(c_cap);
    for (int i = 0; i <= 600; ++i)
        cand.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) / 600.0));

    double best_c = 0.0, best_sse = std::numeric_limits<double>::infinity();
    for (double c : cand) {
        const LineFit f = fit_at(c);
        if (f.sse < best_sse) {
            best_sse = f.sse;
            best_c = c;
        }
    }
    // Local golden-section refinement around the best candidate.
    {
        double a = best_c - std::abs(best_c) * 0.5 - 1e-3 * g_min;
        double b = best_c + std::abs(best_c) * 0.5 + 1e-3 * g_min;
        a = std::max(a, -0.45 * g_min);
        b = std::min(b, c_cap);
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
        double f1 = fit_at(x1).sse, f2 = fit_at(x2).sse;
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = fit_at(x1).sse;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = fit_at(x2).sse;
            }
        }
        const double c_ref = 0.5 * (a + b);
        if (fit_at(c_ref).sse < best_sse) best_c = c_ref;
    }

    const LineFit f = fit_at(best_c);
    PowerLawFit out;
    out.exponent = f.slope;
    out.exponent_se = f.slope_se;
    out.correction = best_c;
    out.log_amplitude = f.intercept;
    out.plain_slope = plain.slope;
    out.plain_slope_se = plain.slope_se;
    return out;
}

}  // namespace burstpdmp
