#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "burstpdmp/model.hpp"
#include "burstpdmp/rng.hpp"

namespace burstpdmp {

struct State2D {
    double x = 0.0;
    double y = 0.0;
    double t = 0.0;
};

enum class EventKind : std::uint8_t { Jump, Observation };

// Exact deterministic drift between jumps over dt >= 0:
//   X(dt) = x0 exp(-gamma1 dt)
//   Y(dt) = y0 exp(-gamma2 dt) + lambda2 x0 (exp(-gamma2 dt) - exp(-gamma1 dt)) / (gamma1 - gamma2)
// evaluated through a uniformly accurate expm1 form whose gamma1 -> gamma2
// limit is the confluent formula lambda2 x0 dt exp(-gamma dt); no accuracy
// cliff near the degenerate line.
State2D flow(const State2D& s, double dt, const ModelParams& p);

struct JumpProposal {
    double wait = 0.0;       // time from the segment start to the accepted jump
    State2D state;           // state at the jump time, before the burst is applied
    std::uint64_t proposals = 0;
};

inline constexpr std::uint64_t kDefaultMaxProposals = 1'000'000'000;

// Next jump time by thinning: propose Exponential(upper bound) waits, accept
// with probability phi(Y)/bound evaluated on the deterministically flowed
// state.  Throws numeric_error with diagnostics if the proposal cap is hit.
JumpProposal next_jump_time(const State2D& s, const Model2D& m, RngStream& rng,
                            std::uint64_t max_proposals = kDefaultMaxProposals);

// Apply one burst: X jumps by a draw from h, Y is continuous.
State2D apply_jump(const State2D& s, const JumpDensity& h, RngStream& rng);

struct TrajectorySample {
    std::vector<double> times;
    std::vector<State2D> states;    // states[i].t == times[i], strictly increasing
    std::vector<EventKind> events;  // Jump entries carry the post-burst state
    std::uint64_t jump_count = 0;
    std::uint64_t proposal_count = 0;
    State2D final_state;
};

struct SimulateOptions {
    std::span<const double> obs_times;  // strictly increasing, within [s0.t, s0.t + horizon]
    std::uint64_t max_proposals = kDefaultMaxProposals;
    bool record_jumps = true;
};

// Exact trajectory over [s0.t, s0.t + horizon]: states recorded at every jump
// and at the requested observation times.  A horizon shorter than the first
// jump yields pure decay matching the flow formula.
TrajectorySample simulate(const State2D& s0, double horizon, const Model2D& m, RngStream& rng,
                          const SimulateOptions& opts = {});

// Draws of the state at n i.i.d. Uniform(burn_in, burn_in + window) times
// along a single trajectory started from s0, time-ordered.  Correlated
// samples; downstream statistics use batch means.
std::vector<State2D> stationary_samples(const Model2D& m, std::size_t n_samples, double burn_in,
                                        double window, RngStream& rng,
                                        const State2D& s0 = {},
                                        std::uint64_t max_proposals = kDefaultMaxProposals);

}  // namespace burstpdmp
