#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace burstpdmp {

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;  // unbiased (n-1 divisor)
    std::size_t n = 0;
};

MeanVar mean_var(std::span<const double> xs);

// Standard error of the mean for serially correlated, time-ordered samples,
// estimated from contiguous batch means.  Batch length must exceed the
// correlation time for the estimate to be honest; callers pick n_batches so
// that holds.
struct BatchStats {
    double mean = 0.0;
    double se = 0.0;
    int n_batches = 0;
};

BatchStats batch_mean_se(std::span<const double> ordered, int n_batches = 32);

// One-sample two-sided Kolmogorov-Smirnov test against a callable CDF with
// fully specified parameters.  Uses the asymptotic critical value with the
// Stephens small-sample correction.
struct KsResult {
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::size_t n = 0;
};

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf,
                 double alpha);

// Chi-square goodness of fit of observed event counts against Poisson(mean)
// with known mean; cells with expected count < 5 are merged into the tails.
struct Chi2Result {
    double statistic = 0.0;
    double critical = 0.0;
    int dof = 0;
    bool pass = false;
};

Chi2Result chi2_poisson_test(std::span<const long> counts, double mean, double alpha);

// Quantile of the standard normal (Acklam's rational approximation, ~1e-9
// relative accuracy).
double normal_quantile(double p);

// Weighted least-squares straight line y = intercept + slope * x with known
// per-point standard deviations.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_se = 0.0;
    double sse = 0.0;  // weighted residual sum of squares
};

LineFit wls_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> sigma);

// Asymptotic power-law exponent of m(g) ~ amplitude * g^exponent as g grows,
// fitted in log space with a first-order finite-size correction:
//     ln m = a + s ln g + ln(1 + c/g).
// Data on coarse logarithmic grids are rarely fully asymptotic at the small-g
// end; a straight log-log fit is biased there, so the correction term is
// scanned (c > -min(g)) and the line refitted at each candidate.  plain_slope
// carries the uncorrected straight-line fit for comparison.
struct PowerLawFit {
    double exponent = 0.0;
    double exponent_se = 0.0;  // conditional on the fitted correction
    double correction = 0.0;
    double log_amplitude = 0.0;
    double plain_slope = 0.0;
    double plain_slope_se = 0.0;
};

PowerLawFit fit_power_law(std::span<const double> g, std::span<const double> values,
                          std::span<const double> rel_se);

}  // namespace burstpdmp
