#include "burstpdmp/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "burstpdmp/errors.hpp"

namespace burstpdmp {

ReducedODE make_reduced_ode(const Model2D& m) {
    m.params.validate();
    return ReducedODE{m.params.gamma2, m.params.lambda2, m.rate,
                      m.burst.moment(1) / m.params.gamma1};
}

OdeTrajectory integrate_ode(double y0, double horizon, const ReducedODE& m,
                            const OdeOptions& opt) {
    if (!(horizon >= 0.0)) throw config_error("integrate_ode: horizon must be nonnegative");
    if (y0 < 0.0) throw config_error("integrate_ode: y0 must be nonnegative");
    std::vector<OdeStepRecord> rec;
    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy[0] = m.rhs(std::max(y[0], 0.0));
    };
    const std::vector<double> yf = integrate_rk45(rhs, {y0}, 0.0, horizon, opt, &rec);
    OdeTrajectory out;
    out.times.reserve(rec.size());
    out.values.reserve(rec.size());
    for (const auto& r : rec) {
        out.times.push_back(r.t);
        out.values.push_back(r.y[0]);
    }
    out.final_value = yf[0];
    return out;
}

JumpDensity build_hbar(const JumpDensity& h, const ModelParams& p) {
    p.validate();
    return h.scaled_by(p.lambda2 / p.gamma1);
}

ReducedJumpModel make_reduced_jump_model(const Model2D& m) {
    m.params.validate();
    return {m.params.gamma2, m.rate, build_hbar(m.burst, m.params)};
}

JumpProposal1D next_jump_time_reduced(const Reduced1DState& s, const ReducedJumpModel& m,
                                      RngStream& rng, std::uint64_t max_proposals) {
    const double bound = m.rate.upper_bound();
    double wait = 0.0;
    for (std::uint64_t k = 1; k <= max_proposals; ++k) {
        wait += rng.exponential_rate(bound);
        const double y = s.y * std::exp(-m.gamma2 * wait);
        if (rng.uniform01() < m.rate.eval(y) / bound) {
            return {wait, {y, s.t + wait}, k};
        }
    }
    std::ostringstream os;
    os << "next_jump_time_reduced: no acceptance within " << max_proposals
       << " proposals (bound = " << bound << ", y = " << s.y << ", t = " << s.t << ")";
    throw numeric_error(os.str());
}

Trajectory1D simulate_reduced(double y0, double horizon, const ReducedJumpModel& m,
                              RngStream& rng, std::span<const double> obs_times,
                              std::uint64_t max_proposals, bool record_jumps) {
    if (!(horizon >= 0.0)) throw config_error("simulate_reduced: horizon must be nonnegative");
    if (y0 < 0.0) throw config_error("simulate_reduced: y0 must be nonnegative");
    const double t_end = horizon;
    for (std::size_t i = 0; i < obs_times.size(); ++i) {
        if (i > 0 && !(obs_times[i] > obs_times[i - 1]))
            throw config_error("simulate_reduced: observation times must be strictly increasing");
        if (obs_times[i] < 0.0 || obs_times[i] > t_end)
            throw config_error("simulate_reduced: observation times must lie within the horizon");
    }

    Trajectory1D out;
    Reduced1DState seg{y0, 0.0};
    std::size_t next_obs = 0;
    auto decay = [&](double y, double dt) { return y * std::exp(-m.gamma2 * dt); };
    auto emit = [&](double t, double y, EventKind kind) {
        out.times.push_back(t);
        out.values.push_back(y);
        out.events.push_back(kind);
    };

    while (seg.t < t_end) {
        JumpProposal1D prop = next_jump_time_reduced(seg, m, rng, max_proposals);
        out.proposal_count += prop.proposals;
        double t_jump = seg.t + prop.wait;
        if (t_jump > t_end) break;
        for (; next_obs < obs_times.size() && obs_times[next_obs] < t_jump; ++next_obs) {
            emit(obs_times[next_obs], decay(seg.y, obs_times[next_obs] - seg.t),
                 EventKind::Observation);
        }
        if (next_obs < obs_times.size() && obs_times[next_obs] == t_jump) {
            emit(t_jump, prop.state.y, EventKind::Observation);
            ++next_obs;
            t_jump = std::nextafter(t_jump, t_end);
        }
        const double y_post = prop.state.y + m.hbar.sample(rng);
        ++out.jump_count;
        if (record_jumps) emit(t_jump, y_post, EventKind::Jump);
        seg = {y_post, t_jump};
    }
    for (; next_obs < obs_times.size(); ++next_obs) {
        emit(obs_times[next_obs], decay(seg.y, obs_times[next_obs] - seg.t),
             EventKind::Observation);
    }
    out.final_value = decay(seg.y, t_end - seg.t);
    out.final_time = t_end;
    return out;
}

std::vector<double> stationary_samples_reduced(const ReducedJumpModel& m, std::size_t n_samples,
                                               double burn_in, double window, RngStream& rng,
                                               double y0, std::uint64_t max_proposals) {
    if (n_samples == 0)
        throw config_error("stationary_samples_reduced: n_samples must be positive");
    if (!(window > 0.0)) throw config_error("stationary_samples_reduced: window must be positive");
    if (!(burn_in >= 0.0))
        throw config_error("stationary_samples_reduced: burn_in must be nonnegative");

    std::vector<double> obs(n_samples);
    for (double& t : obs) t = rng.uniform(burn_in, burn_in + window);
    std::sort(obs.begin(), obs.end());
    for (std::size_t i = 1; i < obs.size(); ++i) {
        if (obs[i] <= obs[i - 1])
            obs[i] = std::nextafter(obs[i - 1], burn_in + window + 1.0);
    }
    Trajectory1D traj =
        simulate_reduced(y0, burn_in + window, m, rng, obs, max_proposals, false);
    return std::move(traj.values);
}

}  // namespace burstpdmp
