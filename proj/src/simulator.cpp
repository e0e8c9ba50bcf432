#include "burstpdmp/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "burstpdmp/errors.hpp"

namespace burstpdmp {
namespace {

// (1 - exp(-u)) / u, accurate for all u; equals 1 at u = 0.
inline double expm1_ratio(double u) {
    if (u == 0.0) return 1.0;
    if (std::abs(u) <= 1.0) return -std::expm1(-u) / u;
    return (1.0 - std::exp(-u)) / u;  // no cancellation once |u| > 1
}

}  // namespace

State2D flow(const State2D& s, double dt, const ModelParams& p) {
    if (dt < 0.0) throw std::invalid_argument("flow: dt must be nonnegative");
    if (dt == 0.0) return s;
    const double d1 = std::exp(-p.gamma1 * dt);
    const double d2 = std::exp(-p.gamma2 * dt);
    const double u = (p.gamma1 - p.gamma2) * dt;
    double y;
    if (std::abs(u) <= 1.0) {
        // y0 d2 + lambda2 x0 dt d2 (1 - e^-u)/u; exact confluent limit at u = 0
        y = s.y * d2 + p.lambda2 * s.x * dt * d2 * expm1_ratio(u);
    } else {
        y = s.y * d2 + p.lambda2 * s.x * (d2 - d1) / (p.gamma1 - p.gamma2);
    }
    return {s.x * d1, y, s.t + dt};
}

JumpProposal next_jump_time(const State2D& s, const Model2D& m, RngStream& rng,
                            std::uint64_t max_proposals) {
    const double bound = m.rate.upper_bound();
    double wait = 0.0;
    for (std::uint64_t k = 1; k <= max_proposals; ++k) {
        wait += rng.exponential_rate(bound);
        // flow from the segment start; proposals do not accumulate roundoff
        const State2D cand = flow(s, wait, m.params);
        const double accept = m.rate.eval(cand.y) / bound;
        if (rng.uniform01() < accept) {
            return {wait, cand, k};
        }
    }
    std::ostringstream os;
    os << "next_jump_time: no acceptance within " << max_proposals
       << " proposals (bound = " << bound << ", state x = " << s.x << ", y = " << s.y
       << ", t = " << s.t << "); rate bound far above the realized rate?";
    throw numeric_error(os.str());
}

State2D apply_jump(const State2D& s, const JumpDensity& h, RngStream& rng) {
    return {s.x + h.sample(rng), s.y, s.t};
}

namespace {

void check_obs_times(std::span<const double> obs, double t0, double t_end) {
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (i > 0 && !(obs[i] > obs[i - 1]))
            throw config_error("simulate: observation times must be strictly increasing");
        if (obs[i] < t0 || obs[i] > t_end)
            throw config_error("simulate: observation times must lie within the horizon");
    }
}

}  // namespace

TrajectorySample simulate(const State2D& s0, double horizon, const Model2D& m, RngStream& rng,
                          const SimulateOptions& opts) {
    if (!(horizon >= 0.0)) throw config_error("simulate: horizon must be nonnegative");
    m.params.validate();
    const double t_end = s0.t + horizon;
    check_obs_times(opts.obs_times, s0.t, t_end);

    TrajectorySample out;
    out.times.reserve(opts.obs_times.size());
    out.states.reserve(opts.obs_times.size());
    out.events.reserve(opts.obs_times.size());

    State2D seg = s0;  // state at the start of the current inter-jump segment
    std::size_t next_obs = 0;
    auto emit = [&](const State2D& st, EventKind kind) {
        out.times.push_back(st.t);
        out.states.push_back(st);
        out.events.push_back(kind);
    };
    // seg.t + (t_obs - seg.t) can land one ulp off the requested time; pin the
    // recorded observation time exactly
    auto observe = [&](double t_obs) {
        State2D st = flow(seg, t_obs - seg.t, m.params);
        st.t = t_obs;
        emit(st, EventKind::Observation);
    };

    while (seg.t < t_end) {
        JumpProposal prop = next_jump_time(seg, m, rng, opts.max_proposals);
        out.proposal_count += prop.proposals;
        double t_jump = seg.t + prop.wait;
        if (t_jump > t_end) {
            // jump falls beyond the horizon; emit remaining observations and stop
            for (; next_obs < opts.obs_times.size(); ++next_obs) {
                observe(opts.obs_times[next_obs]);
            }
            out.final_state = flow(seg, t_end - seg.t, m.params);
            return out;
        }
        for (; next_obs < opts.obs_times.size() && opts.obs_times[next_obs] < t_jump;
             ++next_obs) {
            observe(opts.obs_times[next_obs]);
        }
        // Tie with an observation time (measure zero): observation first, jump
        // record nudged by one ulp to keep recorded times strictly increasing.
        if (next_obs < opts.obs_times.size() && opts.obs_times[next_obs] == t_jump) {
            emit(prop.state, EventKind::Observation);
            ++next_obs;
            t_jump = std::nextafter(t_jump, t_end);
        }
        State2D post = apply_jump(prop.state, m.burst, rng);
        post.t = t_jump;
        ++out.jump_count;
        if (opts.record_jumps) emit(post, EventKind::Jump);
        seg = post;
    }
    for (; next_obs < opts.obs_times.size(); ++next_obs) {
        observe(opts.obs_times[next_obs]);
    }
    out.final_state = seg;
    return out;
}

std::vector<State2D> stationary_samples(const Model2D& m, std::size_t n_samples, double burn_in,
                                        double window, RngStream& rng, const State2D& s0,
                                        std::uint64_t max_proposals) {
    if (n_samples == 0) throw config_error("stationary_samples: n_samples must be positive");
    if (!(window > 0.0)) throw config_error("stationary_samples: window must be positive");
    if (!(burn_in >= 0.0)) throw config_error("stationary_samples: burn_in must be nonnegative");

    // Observation times are drawn before the trajectory so the sampling
    // pattern and the dynamics use one deterministic stream order.
    std::vector<double> obs(n_samples);
    const double t0 = s0.t + burn_in;
    for (double& t : obs) t = rng.uniform(t0, t0 + window);
    std::sort(obs.begin(), obs.end());
    // ties between double draws are measure zero but cheap to break
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (obs[i] <= obs[i - 1]) obs[i] = std::nextafter(obs[i - 1], t0 + window + 1.0);
    }

    SimulateOptions opts;
    opts.obs_times = obs;
    opts.max_proposals = max_proposals;
    opts.record_jumps = false;
    TrajectorySample traj = simulate(s0, burn_in + window, m, rng, opts);
    return std::move(traj.states);
}

}  // namespace burstpdmp
