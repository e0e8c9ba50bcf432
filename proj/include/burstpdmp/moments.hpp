#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "burstpdmp/model.hpp"
#include "burstpdmp/ode.hpp"
#include "burstpdmp/simulator.hpp"
#include "burstpdmp/stats.hpp"

namespace burstpdmp {

// Raw moment families of the two-variable process,
//   mu_k = E[X^k],  nu_k = E[Y X^k]  (nu_0 = E[Y]).
// For a constant burst rate phi the system closes:
//   mu_k' = -gamma1 k mu_k + phi sum_{i<k} C(k,i) mu_i E^{k-i}h
//   nu_0' = -gamma2 nu_0 + lambda2 mu_1
//   nu_k' = -(gamma1 k + gamma2) nu_k + lambda2 mu_{k+1}
//           + phi sum_{i<k} C(k,i) nu_i E^{k-i}h
// The nu equations pull in mu_{k+1}, so integrating nu to order K carries mu
// to order K+1.  State-dependent rates do not close; use the MC estimators.

struct MomentVector {
    std::vector<double> mu;  // mu[0..K+1], mu[0] = 1
    std::vector<double> nu;  // nu[0..K]
    double t = 0.0;

    int order() const { return static_cast<int>(nu.size()) - 1; }
};

// Time derivative under the closed system.  Throws unsupported_closure_error
// for non-constant rates.
MomentVector moment_ode_rhs(const MomentVector& m, const Model2D& model);

MomentVector initial_moments(const State2D& s0, int K);

MomentVector integrate_moments(const MomentVector& m0, double horizon, const Model2D& model,
                               const OdeOptions& opt = {});

// Closed-form stationary fixed point of the same system (forward
// substitution; the system is triangular).
MomentVector stationary_moments(const Model2D& model, int K);

// Monte Carlo moment estimates at a fixed time from an ensemble of
// independent replicas (streams seed, stream_offset .. stream_offset+n-1).
struct MomentEstimate {
    std::vector<double> mu, mu_se;  // index 0..K+1, mu[0] = 1 exactly
    std::vector<double> nu, nu_se;  // index 0..K
    double t = 0.0;
    std::size_t n_replicas = 0;
};

MomentEstimate estimate_moments_mc(const Model2D& model, const State2D& s0, double t, int K,
                                   std::size_t n_replicas, std::uint64_t seed,
                                   std::uint64_t stream_offset = 0, int threads = 1);

// Growth of each moment along a scaling family, fitted as an asymptotic
// power law in gamma1.
struct MomentScaling {
    std::string name;               // "mu1", "nu0", ...
    std::vector<double> estimates;  // one per grid point
    std::vector<double> std_errors;
    double exponent = 0.0;      // asymptotic slope (finite-gamma1 corrected fit)
    double exponent_se = 0.0;
    double plain_slope = 0.0;   // straight log-log WLS slope, for comparison
    double plain_slope_se = 0.0;
    std::string classification;  // "bounded" or "power-law"
};

struct ScalingReport {
    std::vector<double> gamma1_grid;
    double t = 0.0;
    std::size_t n_replicas = 0;
    std::vector<MomentScaling> moments;

    const MomentScaling& find(const std::string& name) const;
};

// Requirements: >= 3 grid points spanning at least two decades, >= 8 replicas.
ScalingReport fit_scaling_exponents(const ScalingFamily& fam, const std::vector<double>& gamma1_grid,
                                    int K, double t, std::size_t n_replicas, std::uint64_t seed,
                                    int threads = 1);

}  // namespace burstpdmp
