#include "burstpdmp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <limits>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "burstpdmp/csv.hpp"
#include "burstpdmp/density.hpp"
#include "burstpdmp/errors.hpp"
#include "burstpdmp/moments.hpp"
#include "burstpdmp/ode.hpp"
#include "burstpdmp/parallel.hpp"
#include "burstpdmp/reduced.hpp"
#include "burstpdmp/simulator.hpp"
#include "burstpdmp/stats.hpp"
#include "burstpdmp/version.hpp"

namespace burstpdmp {

namespace {

using json = nlohmann::ordered_json;

// Stream-id namespaces.  Replica ensembles use the low ids; the per-gamma1
// stationary chains get their own block so no stream is ever reused within a
// command.
constexpr std::uint64_t kChainStreamBase = 0x01000000;

class StageClock {
  public:
    double lap() {
        const auto now = std::chrono::steady_clock::now();
        const double s = std::chrono::duration<double>(now - last_).count();
        last_ = now;
        return s;
    }
    double total() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
    std::chrono::steady_clock::time_point last_ = start_;
};

std::string iso_utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

double round3(double s) { return std::round(s * 1000.0) / 1000.0; }

json manifest_base(const char* command, const ExperimentConfig& cfg, int threads) {
    json m;
    m["tool"] = "burstpdmp";
    m["version"] = kVersion;
    m["command"] = command;
    m["created_utc"] = iso_utc_now();
    m["config_hash"] = config_hash(cfg);
    m["config"] = json::parse(render_config(cfg));
    m["seed"] = cfg.seed;
    m["threads"] = threads;
    return m;
}

std::string write_outputs(const ExperimentConfig& cfg, json manifest,
                          const std::vector<std::pair<std::string, std::string>>& files,
                          const std::vector<std::pair<std::string, double>>& stages,
                          double total_seconds) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    json names = json::array();
    for (const auto& [name, contents] : files) {
        write_file((fs::path(cfg.out_dir) / name).string(), contents);
        names.push_back(name);
    }
    manifest["outputs"] = std::move(names);
    json timings;
    for (const auto& [name, secs] : stages) timings[name] = round3(secs);
    timings["total_seconds"] = round3(total_seconds);
    manifest["timings"] = std::move(timings);
    const std::string path = (fs::path(cfg.out_dir) / "manifest.json").string();
    write_file(path, manifest.dump(2) + "\n");
    return path;
}

std::vector<double> obs_grid(double horizon, double obs_dt) {
    if (!(obs_dt > 0.0)) throw config_error("config field 'sim.obs_dt': must be positive");
    std::vector<double> ts;
    for (std::int64_t k = 1;; ++k) {
        double t = static_cast<double>(k) * obs_dt;
        if (t > horizon * (1.0 + 1e-12)) break;
        ts.push_back(std::min(t, horizon));
        if (ts.back() >= horizon) break;
    }
    return ts;
}

void validate_common(const ExperimentConfig& cfg) {
    if (cfg.sim.horizon < 0.0) throw config_error("config field 'sim.horizon': must be >= 0");
    if (cfg.sim.n_replicas < 1) throw config_error("config field 'sim.n_replicas': must be >= 1");
    if (cfg.sim.n_samples < 1) throw config_error("config field 'sim.n_samples': must be >= 1");
    if (cfg.density.n_bins < 4) throw config_error("config field 'density.n_bins': must be >= 4");
    if (cfg.initial.x < 0.0 || cfg.initial.y < 0.0)
        throw config_error("config field 'initial': state must be nonnegative");
    if (cfg.scaling.grid.empty()) throw config_error("config field 'scaling.grid': must be nonempty");
    for (double g : cfg.scaling.grid)
        if (!(g > 0.0)) throw config_error("config field 'scaling.grid': entries must be positive");
}

// One stationary chain of the two-variable process at a scaling-family grid
// point, reduced to histograms and the batch-mean Y statistics.
struct ChainResult {
    double gamma1 = 0.0;
    DensityGrid hist_x;
    DensityGrid hist_y;
    BatchStats y_mean;
    double burn_in = 0.0;
    double window = 0.0;
};

ChainResult run_chain(const ExperimentConfig& cfg, const ScalingFamily& fam, double gamma1,
                      std::size_t grid_index, double y_max, bool want_x) {
    const Model2D m = fam.instantiate(gamma1);
    ChainResult r;
    r.gamma1 = gamma1;
    r.burn_in = resolve_burn_in(cfg.sim, m.params);
    r.window = resolve_window(cfg.sim, m.rate, static_cast<std::size_t>(cfg.sim.n_samples));
    RngStream rng(cfg.seed, kChainStreamBase + grid_index);
    const State2D s0{cfg.initial.x, cfg.initial.y, 0.0};
    const auto samples = stationary_samples(m, static_cast<std::size_t>(cfg.sim.n_samples),
                                            r.burn_in, r.window, rng, s0);
    std::vector<double> ys(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) ys[i] = samples[i].y;
    r.hist_y = histogram(ys, cfg.density.n_bins, y_max);
    r.y_mean = batch_mean_se(ys);
    if (want_x) {
        std::vector<double> xs(samples.size());
        double x_max = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            xs[i] = samples[i].x;
            x_max = std::max(x_max, samples[i].x);
        }
        if (x_max <= 0.0) x_max = 1.0;
        x_max *= 1.0 + 1.0 / static_cast<double>(cfg.density.n_bins);
        r.hist_x = histogram(xs, cfg.density.n_bins, x_max);
    }
    return r;
}

std::string trajectory_file_name(std::uint64_t stream) {
    return "trajectory_stream" + std::to_string(stream) + ".csv";
}

std::string reduced_file_name(std::uint64_t stream) {
    return "reduced_stream" + std::to_string(stream) + ".csv";
}

json scaling_summary(const ScalingReport& report) {
    json out;
    for (const auto& ms : report.moments) {
        json row;
        row["exponent"] = ms.exponent;
        row["exponent_se"] = ms.exponent_se;
        row["ci95_low"] = ms.exponent - 1.96 * ms.exponent_se;
        row["ci95_high"] = ms.exponent + 1.96 * ms.exponent_se;
        row["plain_log_log_slope"] = ms.plain_slope;
        row["plain_log_log_slope_se"] = ms.plain_slope_se;
        row["classification"] = ms.classification;
        out[ms.name] = std::move(row);
    }
    return out;
}

constexpr const char* kSamplingProtocol =
    "single chain; observation times i.i.d. uniform over [burn_in, burn_in + window], "
    "time-ordered; samples are autocorrelated, standard errors use batch means";

} // namespace

int resolve_threads_setting(const ExperimentConfig& cfg) {
    int req = cfg.threads;
    if (req <= 0) {
        if (const char* env = std::getenv("BURSTPDMP_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || v < 0 || v > 1'000'000)
                throw config_error(std::string("BURSTPDMP_THREADS: expected a small "
                                               "non-negative integer, got '") +
                                   env + "'");
            req = static_cast<int>(v);
        }
    }
    return resolve_threads(req);
}

double resolve_burn_in(const SimConfig& sim, const ModelParams& p) {
    if (sim.burn_in >= 0.0) return sim.burn_in;
    return std::max(20.0 / p.gamma2, 20.0 / p.gamma1);
}

double resolve_window(const SimConfig& sim, const BurstRate& rate, std::size_t n_samples) {
    if (sim.window > 0.0) return sim.window;
    return 4.0 * static_cast<double>(n_samples) / rate.upper_bound();
}

double resolve_y_max(const ExperimentConfig& cfg, const Model2D& reference) {
    if (cfg.density.y_max > 0.0) return cfg.density.y_max;
    const ReducedJumpModel rm = make_reduced_jump_model(reference);
    if (rm.hbar.is_exponential()) return analytic_stationary(rm).tail_cutoff(1e-6);
    const double bb = rm.hbar.mean();
    return rm.rate.upper_bound() / rm.gamma2 * bb + 30.0 * bb;
}

RunResult cmd_simulate(const ExperimentConfig& cfg) {
    validate_common(cfg);
    const int threads = resolve_threads_setting(cfg);
    StageClock clock;
    const auto obs = obs_grid(cfg.sim.horizon, cfg.sim.obs_dt);
    const std::size_t reps = static_cast<std::size_t>(cfg.sim.n_replicas);

    std::vector<std::pair<std::string, std::string>> files(reps);
    json replicas = json::array();
    std::vector<json> replica_info(reps);

    if (cfg.sim.process == "full2d") {
        const Model2D m = build_model(cfg.model);
        std::vector<TrajectorySample> trajs(reps);
        parallel_for_index(reps, threads, [&](std::size_t r) {
            RngStream rng(cfg.seed, r);
            SimulateOptions opts;
            opts.obs_times = obs;
            trajs[r] = simulate(State2D{cfg.initial.x, cfg.initial.y, 0.0}, cfg.sim.horizon, m,
                                rng, opts);
        });
        for (std::size_t r = 0; r < reps; ++r) {
            std::ostringstream os;
            write_trajectory_csv(os, trajs[r]);
            files[r] = {trajectory_file_name(r), os.str()};
            replica_info[r] = json{{"stream", r},
                                   {"jumps", trajs[r].jump_count},
                                   {"proposals", trajs[r].proposal_count},
                                   {"final_x", trajs[r].final_state.x},
                                   {"final_y", trajs[r].final_state.y}};
        }
    } else {
        const ReducedJumpModel rm = make_reduced_jump_model(build_model(cfg.model));
        std::vector<Trajectory1D> trajs(reps);
        parallel_for_index(reps, threads, [&](std::size_t r) {
            RngStream rng(cfg.seed, r);
            trajs[r] = simulate_reduced(cfg.initial.y, cfg.sim.horizon, rm, rng, obs);
        });
        for (std::size_t r = 0; r < reps; ++r) {
            std::ostringstream os;
            write_trajectory_csv_1d(os, trajs[r]);
            files[r] = {reduced_file_name(r), os.str()};
            replica_info[r] = json{{"stream", r},
                                   {"jumps", trajs[r].jump_count},
                                   {"proposals", trajs[r].proposal_count},
                                   {"final_y", trajs[r].final_value}};
        }
    }
    const double sim_seconds = clock.lap();

    for (auto& ri : replica_info) replicas.push_back(std::move(ri));
    json manifest = manifest_base("simulate", cfg, threads);
    manifest["process"] = cfg.sim.process;
    manifest["replicas"] = std::move(replicas);

    RunResult res;
    res.out_dir = cfg.out_dir;
    res.manifest_path =
        write_outputs(cfg, std::move(manifest), files, {{"simulate_seconds", sim_seconds}},
                      clock.total());
    for (const auto& [name, _] : files) res.outputs.push_back(name);
    std::ostringstream sum;
    sum << "simulate: wrote " << reps << " " << cfg.sim.process << " trajectory file"
        << (reps == 1 ? "" : "s") << " (horizon " << format_double(cfg.sim.horizon) << ") to "
        << cfg.out_dir;
    res.summary = sum.str();
    return res;
}

RunResult cmd_reduce(const ExperimentConfig& cfg) {
    validate_common(cfg);
    const int threads = resolve_threads_setting(cfg);
    StageClock clock;
    const Model2D m = build_model(cfg.model);
    const auto obs = obs_grid(cfg.sim.horizon, cfg.sim.obs_dt);

    std::vector<std::pair<std::string, std::string>> files;
    json manifest = manifest_base("reduce", cfg, threads);
    manifest["scaling_kind"] = cfg.scaling.kind;
    std::string what;

    if (cfg.scaling.kind == "S1") {
        // Deterministic limit: the reduced rate equation.
        const ReducedODE ode = make_reduced_ode(m);
        const OdeTrajectory traj = integrate_ode(cfg.initial.y, cfg.sim.horizon, ode);
        std::ostringstream os;
        os << "t,y,event\n";
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            os << format_double(traj.times[i]) << ',' << format_double(traj.values[i]) << ",obs\n";
        files.emplace_back("reduced_ode.csv", os.str());
        manifest["final_y"] = traj.final_value;
        what = "deterministic rate equation";
    } else {
        // Jump limit shared by the S2 and S3 families.
        const ReducedJumpModel rm = make_reduced_jump_model(m);
        const std::size_t reps = static_cast<std::size_t>(cfg.sim.n_replicas);
        std::vector<Trajectory1D> trajs(reps);
        parallel_for_index(reps, threads, [&](std::size_t r) {
            RngStream rng(cfg.seed, r);
            trajs[r] = simulate_reduced(cfg.initial.y, cfg.sim.horizon, rm, rng, obs);
        });
        json replicas = json::array();
        for (std::size_t r = 0; r < reps; ++r) {
            std::ostringstream os;
            write_trajectory_csv_1d(os, trajs[r]);
            files.emplace_back(reduced_file_name(r), os.str());
            replicas.push_back(json{{"stream", r},
                                    {"jumps", trajs[r].jump_count},
                                    {"proposals", trajs[r].proposal_count},
                                    {"final_y", trajs[r].final_value}});
        }
        manifest["replicas"] = std::move(replicas);
        manifest["hbar_mean"] = rm.hbar.mean();
        what = "reduced jump process";
    }
    const double run_seconds = clock.lap();

    RunResult res;
    res.out_dir = cfg.out_dir;
    res.manifest_path =
        write_outputs(cfg, std::move(manifest), files, {{"reduce_seconds", run_seconds}},
                      clock.total());
    for (const auto& [name, _] : files) res.outputs.push_back(name);
    res.summary = "reduce: wrote " + what + " output to " + cfg.out_dir;
    return res;
}

RunResult cmd_moments(const ExperimentConfig& cfg) {
    validate_common(cfg);
    if (cfg.moments.order < 1) throw config_error("config field 'moments.order': must be >= 1");
    const int threads = resolve_threads_setting(cfg);
    StageClock clock;
    const ScalingFamily fam = build_scaling(cfg);
    const ScalingReport report =
        fit_scaling_exponents(fam, cfg.moments.grid, cfg.moments.order, cfg.moments.t,
                              static_cast<std::size_t>(cfg.moments.n_replicas), cfg.seed, threads);
    const double mc_seconds = clock.lap();

    std::vector<MomentRow> rows;
    for (const auto& ms : report.moments)
        for (std::size_t i = 0; i < report.gamma1_grid.size(); ++i)
            rows.push_back({report.gamma1_grid[i], ms.name, ms.estimates[i], ms.std_errors[i]});
    std::ostringstream os;
    write_moments_csv(os, rows);

    json manifest = manifest_base("moments", cfg, threads);
    manifest["gamma1_grid"] = report.gamma1_grid;
    manifest["t"] = report.t;
    manifest["n_replicas"] = report.n_replicas;
    manifest["slopes"] = scaling_summary(report);
    if (fam.base.rate.is_constant()) {
        // Closed-moment oracle alongside the MC estimates.
        json analytic;
        for (double g : cfg.moments.grid) {
            const Model2D m = fam.instantiate(g);
            const MomentVector mv = integrate_moments(
                initial_moments(State2D{cfg.initial.x, cfg.initial.y, 0.0}, cfg.moments.order),
                cfg.moments.t, m);
            json point;
            for (int k = 1; k <= cfg.moments.order; ++k)
                point["mu" + std::to_string(k)] = mv.mu[static_cast<std::size_t>(k)];
            for (int k = 0; k <= cfg.moments.order; ++k)
                point["nu" + std::to_string(k)] = mv.nu[static_cast<std::size_t>(k)];
            analytic[format_double(g)] = std::move(point);
        }
        manifest["closed_moments"] = std::move(analytic);
    }

    RunResult res;
    res.out_dir = cfg.out_dir;
    res.manifest_path = write_outputs(cfg, std::move(manifest),
                                      {{"moment_scaling.csv", os.str()}},
                                      {{"mc_seconds", mc_seconds}}, clock.total());
    res.outputs = {"moment_scaling.csv"};
    std::ostringstream sum;
    sum << "moments: " << cfg.scaling.kind << " family, " << report.gamma1_grid.size()
        << " grid points, " << report.n_replicas << " replicas each;";
    for (const char* name : {"mu1", "mu2", "nu1", "nu2"}) {
        for (const auto& ms : report.moments)
            if (ms.name == name) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), " %s slope %.3f;", name, ms.exponent);
                sum << buf;
            }
    }
    res.summary = sum.str();
    return res;
}

namespace {

struct DensitySweep {
    std::vector<ChainResult> chains;
    std::vector<DensityGrid> laws;   // empty grids when no closed form exists
    bool has_law = false;
    double y_max = 0.0;
    std::vector<DistanceRow> distances;
};

DensitySweep run_density_sweep(const ExperimentConfig& cfg, const ScalingFamily& fam,
                               bool want_x) {
    DensitySweep sweep;
    sweep.y_max = resolve_y_max(cfg, fam.instantiate(cfg.scaling.grid.front()));
    sweep.has_law = fam.base.burst.is_exponential();
    for (std::size_t i = 0; i < cfg.scaling.grid.size(); ++i) {
        const double g = cfg.scaling.grid[i];
        sweep.chains.push_back(run_chain(cfg, fam, g, i, sweep.y_max, want_x));
        if (sweep.has_law) {
            const StationaryLaw law = analytic_stationary(make_reduced_jump_model(fam.instantiate(g)));
            sweep.laws.push_back(law.bin_average(cfg.density.n_bins, sweep.y_max));
            for (auto norm : {DistanceNorm::L1, DistanceNorm::L2, DistanceNorm::Linf})
                sweep.distances.push_back(
                    {g, to_string(norm),
                     density_distance(sweep.chains.back().hist_y, sweep.laws.back(), norm)});
        } else {
            sweep.laws.emplace_back();
        }
    }
    return sweep;
}

json sweep_resolved(const DensitySweep& sweep) {
    json resolved;
    resolved["y_max"] = sweep.y_max;
    json per_gamma;
    for (const auto& c : sweep.chains)
        per_gamma[format_double(c.gamma1)] =
            json{{"burn_in", c.burn_in}, {"window", c.window}, {"tail_mass", c.hist_y.tail_mass}};
    resolved["per_gamma1"] = std::move(per_gamma);
    return resolved;
}

} // namespace

RunResult cmd_density(const ExperimentConfig& cfg) {
    validate_common(cfg);
    const int threads = resolve_threads_setting(cfg);
    StageClock clock;
    const ScalingFamily fam = build_scaling(cfg);
    const DensitySweep sweep = run_density_sweep(cfg, fam, /*want_x=*/false);
    const double sweep_seconds = clock.lap();

    std::vector<std::pair<std::string, std::string>> files;
    for (std::size_t i = 0; i < sweep.chains.size(); ++i) {
        const std::string tag = format_double(sweep.chains[i].gamma1);
        std::ostringstream os;
        write_density_csv(os, sweep.chains[i].hist_y);
        files.emplace_back("density_mc_gamma1_" + tag + ".csv", os.str());
        if (sweep.has_law) {
            std::ostringstream los;
            write_density_csv(los, sweep.laws[i]);
            files.emplace_back("density_analytic_gamma1_" + tag + ".csv", los.str());
        }
    }
    if (sweep.has_law) {
        std::ostringstream os;
        write_distances_csv(os, sweep.distances);
        files.emplace_back("distances.csv", os.str());
    }

    json manifest = manifest_base("density", cfg, threads);
    manifest["sampling_protocol"] = kSamplingProtocol;
    manifest["resolved"] = sweep_resolved(sweep);
    manifest["analytic_law_available"] = sweep.has_law;
    if (!sweep.has_law)
        manifest["analytic_law_note"] =
            "no closed form for this burst law; compare against solve_density_pde steady state";
    if (sweep.has_law) {
        json d;
        for (const auto& row : sweep.distances) d[format_double(row.gamma1)][row.norm] = row.value;
        manifest["distances"] = std::move(d);
    }

    RunResult res;
    res.out_dir = cfg.out_dir;
    res.manifest_path = write_outputs(cfg, std::move(manifest), files,
                                      {{"sweep_seconds", sweep_seconds}}, clock.total());
    for (const auto& [name, _] : files) res.outputs.push_back(name);
    std::ostringstream sum;
    sum << "density: " << sweep.chains.size() << " gamma1 points, " << cfg.sim.n_samples
        << " samples each";
    if (sweep.has_law) {
        sum << "; L1 to analytic law:";
        for (const auto& row : sweep.distances)
            if (row.norm == to_string(DistanceNorm::L1)) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), " %.4f", row.value);
                sum << buf;
            }
    }
    res.summary = sum.str();
    return res;
}

RunResult cmd_reproduce_fig1(const ExperimentConfig& cfg) {
    validate_common(cfg);
    const int threads = resolve_threads_setting(cfg);
    StageClock clock;
    const ScalingFamily fam = build_scaling(cfg);
    const DensitySweep sweep = run_density_sweep(cfg, fam, /*want_x=*/true);
    const double sweep_seconds = clock.lap();

    std::vector<std::pair<std::string, std::string>> files;
    for (std::size_t i = 0; i < sweep.chains.size(); ++i) {
        const std::string tag = format_double(sweep.chains[i].gamma1);
        std::ostringstream xs, ys;
        write_density_csv(xs, sweep.chains[i].hist_x);
        write_density_csv(ys, sweep.chains[i].hist_y);
        files.emplace_back("fig1_hist_x_gamma1_" + tag + ".csv", xs.str());
        files.emplace_back("fig1_hist_y_gamma1_" + tag + ".csv", ys.str());
        if (sweep.has_law) {
            std::ostringstream ls;
            write_density_csv(ls, sweep.laws[i]);
            files.emplace_back("fig1_law_y_gamma1_" + tag + ".csv", ls.str());
        }
    }

    json manifest = manifest_base("reproduce-fig1", cfg, threads);
    manifest["sampling_protocol"] = kSamplingProtocol;
    manifest["resolved"] = sweep_resolved(sweep);
    manifest["analytic_law_available"] = sweep.has_law;

    RunResult res;
    res.out_dir = cfg.out_dir;
    res.manifest_path = write_outputs(cfg, std::move(manifest), files,
                                      {{"sweep_seconds", sweep_seconds}}, clock.total());
    for (const auto& [name, _] : files) res.outputs.push_back(name);
    std::ostringstream sum;
    sum << "reproduce-fig1: X/Y histograms";
    if (sweep.has_law) sum << " and analytic overlays";
    sum << " for gamma1 in {";
    for (std::size_t i = 0; i < cfg.scaling.grid.size(); ++i)
        sum << (i ? ", " : "") << format_double(cfg.scaling.grid[i]);
    sum << "} in " << cfg.out_dir;
    res.summary = sum.str();
    return res;
}

RunResult cmd_reproduce_fig2(const ExperimentConfig& cfg) {
    validate_common(cfg);
    if (cfg.moments.order < 2)
        throw config_error("config field 'moments.order': reproduce-fig2 needs order >= 2");
    const int threads = resolve_threads_setting(cfg);
    StageClock clock;
    const ScalingFamily fam = build_scaling(cfg);

    // Panels A and B: density distances and the Y mean along the gamma1 sweep.
    const DensitySweep sweep = run_density_sweep(cfg, fam, /*want_x=*/false);
    const double sweep_seconds = clock.lap();

    // Panels C and D: moment growth along the family.
    const ScalingReport report =
        fit_scaling_exponents(fam, cfg.moments.grid, cfg.moments.order, cfg.moments.t,
                              static_cast<std::size_t>(cfg.moments.n_replicas), cfg.seed, threads);
    const double mc_seconds = clock.lap();

    std::vector<std::pair<std::string, std::string>> files;
    if (sweep.has_law) {
        std::ostringstream os;
        write_distances_csv(os, sweep.distances);
        files.emplace_back("fig2a_distances.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "gamma1,mc_mean,mc_stderr,analytic_mean\n";
        for (std::size_t i = 0; i < sweep.chains.size(); ++i) {
            double analytic = std::numeric_limits<double>::quiet_NaN();
            if (sweep.has_law) {
                const StationaryLaw law = analytic_stationary(
                    make_reduced_jump_model(fam.instantiate(sweep.chains[i].gamma1)));
                analytic = law.moment(1);
            }
            os << format_double(sweep.chains[i].gamma1) << ','
               << format_double(sweep.chains[i].y_mean.mean) << ','
               << format_double(sweep.chains[i].y_mean.se) << ',' << format_double(analytic)
               << '\n';
        }
        files.emplace_back("fig2b_ymean.csv", os.str());
    }
    {
        std::vector<MomentRow> rows;
        for (const auto& ms : report.moments)
            for (std::size_t i = 0; i < report.gamma1_grid.size(); ++i)
                rows.push_back({report.gamma1_grid[i], ms.name, ms.estimates[i], ms.std_errors[i]});
        std::ostringstream os;
        write_moments_csv(os, rows);
        files.emplace_back("fig2cd_moments.csv", os.str());
    }

    json manifest = manifest_base("reproduce-fig2", cfg, threads);
    manifest["sampling_protocol"] = kSamplingProtocol;
    manifest["resolved"] = sweep_resolved(sweep);
    manifest["analytic_law_available"] = sweep.has_law;
    if (sweep.has_law) {
        json d;
        for (const auto& row : sweep.distances) d[format_double(row.gamma1)][row.norm] = row.value;
        manifest["distances"] = std::move(d);
    }
    manifest["slopes"] = scaling_summary(report);

    RunResult res;
    res.out_dir = cfg.out_dir;
    res.manifest_path = write_outputs(
        cfg, std::move(manifest), files,
        {{"sweep_seconds", sweep_seconds}, {"moment_mc_seconds", mc_seconds}}, clock.total());
    for (const auto& [name, _] : files) res.outputs.push_back(name);
    std::ostringstream sum;
    sum << "reproduce-fig2: wrote panels to " << cfg.out_dir << ";";
    for (const char* name : {"mu2", "nu2"})
        for (const auto& ms : report.moments)
            if (ms.name == name) {
                char buf[64];
                std::snprintf(buf, sizeof(buf), " %s slope %.3f;", name, ms.exponent);
                sum << buf;
            }
    res.summary = sum.str();
    return res;
}

namespace {

struct CheckLine {
    bool pass = false;
    std::string text;
};

CheckLine check_flow_exactness(double tol) {
    OdeOptions opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-14;
    double worst = 0.0;
    for (double gamma2 : {0.5, 1.0, 3.0}) {
        for (double delta : {0.0, 1e-12, -1e-12, 1e-6, -1e-6, 1.0, 10.0}) {
            const double gamma1 = gamma2 + delta;
            if (gamma1 <= 0.0) continue;
            for (double lambda2 : {0.7, 2.0}) {
                ModelParams p;
                p.gamma1 = gamma1;
                p.gamma2 = gamma2;
                p.lambda2 = lambda2;
                const auto rhs = [&](double, const std::vector<double>& y,
                                     std::vector<double>& d) {
                    d[0] = -p.gamma1 * y[0];
                    d[1] = -p.gamma2 * y[1] + p.lambda2 * y[0];
                };
                const std::pair<double, double> ics[] = {{0.0, 0.5}, {1.0, 0.0}, {2.3, 1.7}};
                for (auto [x0, y0] : ics) {
                    for (double dt : {1e-3, 0.3, 2.0}) {
                        const State2D exact = flow(State2D{x0, y0, 0.0}, dt, p);
                        const auto ref = integrate_rk45(rhs, {x0, y0}, 0.0, dt, opt);
                        worst = std::max(worst, std::abs(exact.x - ref[0]));
                        worst = std::max(worst, std::abs(exact.y - ref[1]));
                    }
                }
            }
        }
    }
    CheckLine c;
    c.pass = worst <= tol;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "flow-exactness: max|flow - rk45| %.3e (tol %.1e)", worst,
                  tol);
    c.text = buf;
    return c;
}

CheckLine check_thinning_ks(std::uint64_t seed) {
    // Constant rate with a deliberately loose majorant, so acceptance is
    // exercised; inter-jump waits must still be Exponential(rate).
    const double phi = 3.0;
    ModelParams p;
    p.gamma1 = 2.0;
    p.gamma2 = 1.0;
    p.lambda2 = 1.5;
    Model2D m{p, BurstRate::constant(phi).with_upper_bound(3.0 * phi),
              JumpDensity::exponential(1.0)};
    RngStream rng(seed, 0x5e1fc4ec);
    State2D s{0.4, 0.2, 0.0};
    const std::size_t n = 20000;
    std::vector<double> waits;
    waits.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const JumpProposal jp = next_jump_time(s, m, rng);
        waits.push_back(jp.wait);
        s = apply_jump(jp.state, m.burst, rng);
    }
    const auto ks = ks_test(std::move(waits), [phi](double t) { return -std::expm1(-phi * t); },
                            0.01);
    CheckLine c;
    c.pass = ks.pass;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "thinning-ks: D %.4f vs threshold %.4f (n %zu, alpha 0.01)",
                  ks.statistic, ks.threshold, ks.n);
    c.text = buf;
    return c;
}

CheckLine check_moment_fixed_point() {
    ModelParams p;
    p.gamma1 = 10.0;
    p.gamma2 = 1.0;
    p.lambda2 = 2.0;
    const Model2D m{p, BurstRate::constant(2.0), JumpDensity::exponential(1.0)};
    const MomentVector fix = stationary_moments(m, 2);
    MomentVector run = fix;
    run.t = 0.0;
    const MomentVector out = integrate_moments(run, 5.0, m);
    double worst = 0.0;
    for (std::size_t i = 0; i < fix.mu.size(); ++i)
        worst = std::max(worst, std::abs(out.mu[i] - fix.mu[i]) / std::max(1.0, std::abs(fix.mu[i])));
    for (std::size_t i = 0; i < fix.nu.size(); ++i)
        worst = std::max(worst, std::abs(out.nu[i] - fix.nu[i]) / std::max(1.0, std::abs(fix.nu[i])));
    CheckLine c;
    c.pass = worst <= 1e-8;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "moment-fixed-point: max relative drift %.3e over horizon 5 (tol 1e-8)", worst);
    c.text = buf;
    return c;
}

CheckLine check_moment_mc(std::uint64_t seed) {
    ModelParams p;
    p.gamma1 = 4.0;
    p.gamma2 = 1.0;
    p.lambda2 = 2.0;
    const Model2D m{p, BurstRate::constant(2.0), JumpDensity::exponential(0.8)};
    const double t = 3.0;
    const MomentVector ode = integrate_moments(initial_moments(State2D{}, 1), t, m);
    const MomentEstimate mc = estimate_moments_mc(m, State2D{}, t, 1, 20000, seed, 0x6006000);
    const double diff = std::abs(mc.mu[1] - ode.mu[1]);
    const double limit = 4.0 * mc.mu_se[1];
    CheckLine c;
    c.pass = diff <= limit;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "moment-mc-vs-ode: |mc - ode| %.4f <= 4 SE = %.4f", diff,
                  limit);
    c.text = buf;
    return c;
}

CheckLine check_law_residual() {
    ModelParams p;
    p.gamma1 = 10.0;
    p.gamma2 = 1.0;
    p.lambda2 = 2.0;
    const Model2D m{p, BurstRate::hill(5.0, 1.0, 4.0, 1.0, 4.0), JumpDensity::exponential(5.0)};
    const ReducedJumpModel rm = make_reduced_jump_model(m);
    const StationaryLaw law = analytic_stationary(rm);
    double vmax = 0.0;
    for (int i = 1; i <= 60; ++i) vmax = std::max(vmax, law.pdf(0.2 * i));
    double worst = 0.0;
    for (double y : {0.5, 1.0, 2.0, 3.5, 5.0, 7.0, 9.0, 12.0})
        worst = std::max(worst, std::abs(stationary_residual(law, rm, y)));
    worst /= vmax;
    CheckLine c;
    c.pass = worst <= 1e-6;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "stationary-law-residual: max|residual|/max pdf %.3e (tol 1e-6)", worst);
    c.text = buf;
    return c;
}

} // namespace

SelfCheckReport run_selfcheck(const SelfCheckOptions& opt) {
    StageClock clock;
    std::vector<CheckLine> checks;
    checks.push_back(check_flow_exactness(opt.flow_tol));
    checks.push_back(check_thinning_ks(opt.seed));
    checks.push_back(check_moment_fixed_point());
    checks.push_back(check_moment_mc(opt.seed));
    checks.push_back(check_law_residual());

    SelfCheckReport rep;
    rep.passed = true;
    std::ostringstream os;
    int n_pass = 0;
    for (const auto& c : checks) {
        os << (c.pass ? "[PASS] " : "[FAIL] ") << c.text << '\n';
        rep.passed = rep.passed && c.pass;
        n_pass += c.pass ? 1 : 0;
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "selfcheck: %s (%d/%zu checks, %.1f s)",
                  rep.passed ? "PASS" : "FAIL", n_pass, checks.size(), clock.total());
    os << buf << '\n';
    rep.text = os.str();
    return rep;
}

} // namespace burstpdmp
