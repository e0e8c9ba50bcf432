#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "burstpdmp/model.hpp"
#include "burstpdmp/ode.hpp"
#include "burstpdmp/rng.hpp"
#include "burstpdmp/simulator.hpp"

namespace burstpdmp {

// Fast-bursting limits of the two-variable model, keeping only Y.
//
// When the burst rate amplitude grows with gamma1 (family S1) the noise
// averages out and Y follows the deterministic rate equation
//   dY/dt = -gamma2 Y + lambda2 psi(Y),   psi(y) = b phi(y) / gamma1.
// When the burst size or the coupling grows instead (S2, S3) Y remains a
// jump process with burst size density
//   hbar(d) = (gamma1 / lambda2) h((gamma1 / lambda2) d).

struct ReducedODE {
    double gamma2 = 1.0;
    double lambda2 = 1.0;
    BurstRate rate;       // phi entering psi
    double b_over_gamma1 = 1.0;

    double psi(double y) const { return b_over_gamma1 * rate.eval(y); }
    double rhs(double y) const { return -gamma2 * y + lambda2 * psi(y); }
};

ReducedODE make_reduced_ode(const Model2D& m);

struct OdeTrajectory {
    std::vector<double> times;
    std::vector<double> values;
    double final_value = 0.0;
};

// Adaptive integration of the reduced rate equation; records accepted steps.
OdeTrajectory integrate_ode(double y0, double horizon, const ReducedODE& m,
                            const OdeOptions& opt = {});

struct ReducedJumpModel {
    double gamma2 = 1.0;
    BurstRate rate;
    JumpDensity hbar;
};

// Burst size density seen by Y: scaled_by(lambda2 / gamma1).  Exponential(b)
// maps to Exponential(b lambda2 / gamma1).
JumpDensity build_hbar(const JumpDensity& h, const ModelParams& p);

ReducedJumpModel make_reduced_jump_model(const Model2D& m);

struct Trajectory1D {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<EventKind> events;
    std::uint64_t jump_count = 0;
    std::uint64_t proposal_count = 0;
    double final_value = 0.0;
    double final_time = 0.0;
};

struct Reduced1DState {
    double y = 0.0;
    double t = 0.0;
};

// Thinning proposal for the one-variable jump process (flow y e^{-gamma2 dt}).
struct JumpProposal1D {
    double wait = 0.0;
    Reduced1DState state;  // pre-jump
    std::uint64_t proposals = 0;
};

JumpProposal1D next_jump_time_reduced(const Reduced1DState& s, const ReducedJumpModel& m,
                                      RngStream& rng,
                                      std::uint64_t max_proposals = kDefaultMaxProposals);

Trajectory1D simulate_reduced(double y0, double horizon, const ReducedJumpModel& m,
                              RngStream& rng, std::span<const double> obs_times = {},
                              std::uint64_t max_proposals = kDefaultMaxProposals,
                              bool record_jumps = true);

// Same protocol as the two-variable stationary sampler.
std::vector<double> stationary_samples_reduced(const ReducedJumpModel& m, std::size_t n_samples,
                                               double burn_in, double window, RngStream& rng,
                                               double y0 = 0.0,
                                               std::uint64_t max_proposals = kDefaultMaxProposals);

}  // namespace burstpdmp
