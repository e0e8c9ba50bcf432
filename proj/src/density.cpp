#include "burstpdmp/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "burstpdmp/errors.hpp"
#include "burstpdmp/quadrature.hpp"

namespace burstpdmp {

double DensityGrid::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * dy();
}

void DensityGrid::normalize() {
    const double mass = integral();
    if (!(mass > 0.0)) throw numeric_error("DensityGrid: cannot normalize zero mass");
    for (double& v : values) v /= mass;
    tail_mass = 0.0;
}

DensityGrid histogram(std::span<const double> samples, int n_bins, double y_max) {
    if (n_bins < 1) throw config_error("histogram: n_bins must be positive");
    if (!(y_max > 0.0)) throw config_error("histogram: y_max must be positive");
    if (samples.empty()) throw config_error("histogram: empty sample");
    DensityGrid g;
    g.y_max = y_max;
    g.values.assign(static_cast<std::size_t>(n_bins), 0.0);
    const double scale = static_cast<double>(n_bins) / y_max;
    std::size_t inside = 0, above = 0;
    for (double s : samples) {
        if (s < 0.0) throw config_error("histogram: negative sample");
        if (s >= y_max) {
            ++above;
            continue;
        }
        const auto i = static_cast<std::size_t>(s * scale);
        g.values[std::min(i, g.values.size() - 1)] += 1.0;
        ++inside;
    }
    if (inside == 0)
        throw numeric_error("histogram: degenerate, all samples beyond y_max = " +
                            std::to_string(y_max));
    const double n = static_cast<double>(samples.size());
    const double dy = g.dy();
    for (double& v : g.values) v /= n * dy;
    g.tail_mass = static_cast<double>(above) / n;
    return g;
}

double StationaryLaw::log_unnormalized(double y) const {
    if (y <= 0.0) return -std::numeric_limits<double>::infinity();
    double lp = a_ * std::log(y) - y / bb_;
    if (c_ != 0.0) lp += c_ * std::log(rate_.A() + rate_.B() * std::pow(y, rate_.n()));
    return lp;
}

double StationaryLaw::pdf(double y) const {
    if (y < 0.0) return 0.0;
    if (y == 0.0) {
        // integrable edge: +inf for a < 0, finite for a = 0, zero for a > 0
        if (a_ > 0.0) return 0.0;
        if (a_ == 0.0) return C_ * std::pow(rate_.A(), c_);
        return std::numeric_limits<double>::infinity();
    }
    return C_ * std::exp(log_unnormalized(y));
}

double StationaryLaw::pdf_derivative(double y) const {
    if (!(y > 0.0)) throw config_error("StationaryLaw: derivative needs y > 0");
    double dlog = a_ / y - 1.0 / bb_;
    if (c_ != 0.0) {
        const double n = rate_.n();
        const double yn1 = std::pow(y, n - 1.0);
        dlog += c_ * rate_.B() * n * yn1 / (rate_.A() + rate_.B() * yn1 * y);
    }
    return pdf(y) * dlog;
}

namespace {

// Integral of the unnormalized law over (0, y_hi], handling a in (-1, 0).
double law_integral(const StationaryLaw& law, double y_lo, double y_hi, double rel_tol,
                    const std::function<double(double)>& weights = nullptr) {
    auto f = [&](double y) {
        const double base = std::exp(law.log_unnormalized(y));
        return weights ? weights(y) * base : base;
    };
    if (y_lo == 0.0 && law.y_exponent() < 0.0) {
        return integrate_left_singular(f, law.y_exponent(), 0.0, y_hi, rel_tol).value;
    }
    return integrate(f, y_lo, y_hi, rel_tol).value;
}

}  // namespace

StationaryLaw analytic_stationary(const ReducedJumpModel& m) {
    if (!m.hbar.is_exponential()) {
        throw config_error(
            "analytic_stationary: closed form requires an exponential burst law; relax "
            "solve_density_pde to steady state instead");
    }
    if (!(m.gamma2 > 0.0)) throw config_error("analytic_stationary: gamma2 must be positive");

    StationaryLaw law;
    law.rate_ = m.rate;
    law.gamma2_ = m.gamma2;
    law.bb_ = m.hbar.exponential_mean();
    if (m.rate.is_constant()) {
        // Gamma(phi/gamma2, bb)
        law.a_ = m.rate.constant_value() / m.gamma2 - 1.0;
        law.c_ = 0.0;
    } else {
        const double phi0 = m.rate.phi0(), A = m.rate.A(), B = m.rate.B(), K = m.rate.K(),
                     n = m.rate.n();
        law.a_ = phi0 / (A * m.gamma2) - 1.0;
        law.c_ = phi0 * (K - B / A) / (n * B * m.gamma2);
    }
    if (!(law.a_ > -1.0))
        throw config_error("analytic_stationary: density not integrable (phi(0)/gamma2 <= 0?)");

    // Integration cutoff: the unnormalized law decays like y^m e^(-y/bb) with
    // m = a + max(c, 0) n; walk out until the local value is negligible
    // relative to the peak scale.
    const double n_exp = m.rate.is_constant() ? 1.0 : m.rate.n();
    const double m_pow = law.a_ + std::max(law.c_, 0.0) * n_exp;
    double y_cut = law.bb_ * std::max(20.0, 4.0 * (m_pow + 1.0));
    const double log_peak = law.log_unnormalized(std::max(law.bb_ * std::max(m_pow, 0.5), 1e-3));
    for (int it = 0; it < 200 && law.log_unnormalized(y_cut) > log_peak - 60.0; ++it)
        y_cut *= 1.4;
    law.y_cut_ = y_cut;

    const double Z = law_integral(law, 0.0, y_cut, 1e-12);
    if (!(Z > 0.0) || !std::isfinite(Z))
        throw numeric_error("analytic_stationary: normalization integral failed");
    law.C_ = 1.0 / Z;
    return law;
}

double StationaryLaw::moment(int j) const {
    if (j < 0) throw config_error("StationaryLaw: moment order must be nonnegative");
    if (j == 0) return 1.0;
    auto w = [j](double y) { return std::pow(y, j); };
    // moments push the effective cutoff outward
    double cut = y_cut_ * (1.0 + 0.5 * static_cast<double>(j));
    return C_ * law_integral(*this, 0.0, cut, 1e-11, w);
}

double StationaryLaw::tail_mass_beyond(double y) const {
    if (y <= 0.0) return 1.0;
    const double hi = std::max(y_cut_ * 2.0, y * 2.0);
    if (y >= hi) return 0.0;
    return C_ * law_integral(*this, y, hi, 1e-9);
}

double StationaryLaw::tail_cutoff(double tail_bound) const {
    if (!(tail_bound > 0.0 && tail_bound < 1.0))
        throw config_error("StationaryLaw: tail bound must lie in (0,1)");
    double lo = bb_ * 1e-3, hi = y_cut_ * 2.0;
    while (tail_mass_beyond(hi) > tail_bound) hi *= 1.5;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (tail_mass_beyond(mid) > tail_bound)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

DensityGrid StationaryLaw::bin_average(int n_bins, double y_max) const {
    if (n_bins < 1) throw config_error("StationaryLaw: n_bins must be positive");
    if (!(y_max > 0.0)) throw config_error("StationaryLaw: y_max must be positive");
    DensityGrid g;
    g.y_max = y_max;
    g.values.resize(static_cast<std::size_t>(n_bins));
    const double dy = g.dy();
    for (int i = 0; i < n_bins; ++i) {
        const double lo = static_cast<double>(i) * dy;
        const double hi = lo + dy;
        g.values[static_cast<std::size_t>(i)] = C_ * law_integral(*this, lo, hi, 1e-9) / dy;
    }
    g.tail_mass = tail_mass_beyond(y_max);
    return g;
}

double stationary_residual(const StationaryLaw& law, const ReducedJumpModel& m, double y) {
    if (!(y > 0.0)) throw config_error("stationary_residual: y must be positive");
    if (!m.hbar.is_exponential())
        throw config_error("stationary_residual: needs the exponential closed form");
    const double bb = m.hbar.exponential_mean();
    auto conv_f = [&](double z) {
        return m.rate.eval(z) * law.pdf(z) * std::exp(-(y - z) / bb) / bb;
    };
    double conv;
    if (law.y_exponent() < 0.0) {
        conv = integrate_left_singular(conv_f, law.y_exponent(), 0.0, y, 1e-11).value;
    } else {
        conv = integrate(conv_f, 0.0, y, 1e-11).value;
    }
    const double drift = m.gamma2 * (law.pdf(y) + y * law.pdf_derivative(y));
    return drift + conv - m.rate.eval(y) * law.pdf(y);
}

PdeResult solve_density_pde(const DensityGrid& v0, double horizon, const ReducedJumpModel& m,
                            const PdeOptions& opt) {
    if (!(horizon >= 0.0)) throw config_error("solve_density_pde: horizon must be nonnegative");
    const int n = v0.n_bins();
    if (n < 4) throw config_error("solve_density_pde: grid too coarse");
    const double dy = v0.dy();
    if (m.hbar.moment(1) < 20.0 * dy)
        throw config_error("solve_density_pde: grid must resolve the burst mean with >= 20 cells");
    for (double t : opt.snapshot_times) {
        if (t < 0.0 || t > horizon)
            throw config_error("solve_density_pde: snapshot times must lie within the horizon");
    }

    // Redistribution kernel: mass leaving cell j lands in cell j+k with
    // trapezoid weight w[k]; columns are normalized so jumps conserve mass on
    // the truncated domain exactly.
    std::vector<double> w(static_cast<std::size_t>(n));
    w[0] = 0.5 * dy * 0.5 * (m.hbar.pdf(0.0) + m.hbar.pdf(0.5 * dy));
    for (int k = 1; k < n; ++k) {
        const double lo = (static_cast<double>(k) - 0.5) * dy;
        const double hi = lo + dy;
        w[static_cast<std::size_t>(k)] = dy * 0.5 * (m.hbar.pdf(lo) + m.hbar.pdf(hi));
    }
    std::vector<double> col_norm(static_cast<std::size_t>(n));
    {
        // suffix sums: col_norm[j] = sum_{k=0}^{n-1-j} w[k]
        double acc = 0.0;
        for (int j = n - 1; j >= 0; --j) {
            acc += w[static_cast<std::size_t>(n - 1 - j)];
            col_norm[static_cast<std::size_t>(j)] = acc;
        }
        for (double& c : col_norm) {
            if (!(c > 0.0)) throw numeric_error("solve_density_pde: degenerate jump kernel");
        }
    }

    std::vector<double> phi(static_cast<std::size_t>(n));
    double phi_max = 0.0;
    for (int i = 0; i < n; ++i) {
        phi[static_cast<std::size_t>(i)] = m.rate.eval(v0.center(i));
        phi_max = std::max(phi_max, phi[static_cast<std::size_t>(i)]);
    }

    const double dt_cfl = opt.cfl * std::min(dy / (m.gamma2 * v0.y_max), 1.0 / phi_max);
    PdeResult res;
    res.dt_used = (opt.dt > 0.0) ? opt.dt : dt_cfl;
    if (res.dt_used > dt_cfl) {
        res.dt_used = dt_cfl;
        res.dt_reduced = true;
    }

    DensityGrid v = v0;
    const double mass0 = v.integral();
    std::vector<double> src(static_cast<std::size_t>(n)), dvdt(static_cast<std::size_t>(n));
    double t = 0.0;
    std::size_t next_snap = 0;
    std::vector<double> snaps = opt.snapshot_times;
    std::sort(snaps.begin(), snaps.end());

    auto step = [&](double dt) {
        auto& val = v.values;
        for (int j = 0; j < n; ++j)
            src[static_cast<std::size_t>(j)] = phi[static_cast<std::size_t>(j)] *
                                               val[static_cast<std::size_t>(j)] /
                                               col_norm[static_cast<std::size_t>(j)];
        for (int i = 0; i < n; ++i) {
            // conservative upwind drift, velocity -gamma2 y (toward the origin)
            const double flux_right =
                (i + 1 < n) ? m.gamma2 * (static_cast<double>(i + 1) * dy) *
                                  val[static_cast<std::size_t>(i + 1)]
                            : 0.0;
            const double flux_left =
                m.gamma2 * (static_cast<double>(i) * dy) * val[static_cast<std::size_t>(i)];
            double gain = 0.0;
            for (int j = 0; j <= i; ++j)
                gain += src[static_cast<std::size_t>(j)] * w[static_cast<std::size_t>(i - j)];
            dvdt[static_cast<std::size_t>(i)] =
                (flux_right - flux_left) / dy + gain -
                phi[static_cast<std::size_t>(i)] * val[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < n; ++i)
            val[static_cast<std::size_t>(i)] += dt * dvdt[static_cast<std::size_t>(i)];
    };

    while (t < horizon) {
        double dt = std::min(res.dt_used, horizon - t);
        if (next_snap < snaps.size() && snaps[next_snap] <= t + dt + 1e-15) {
            dt = std::max(snaps[next_snap] - t, 0.0);
            if (dt > 0.0) step(dt);
            t = snaps[next_snap];
            res.snapshots.push_back(v);
            ++next_snap;
            ++res.steps;
            continue;
        }
        step(dt);
        t += dt;
        ++res.steps;
        if ((res.steps & 0xFF) == 0 || t >= horizon) {
            const double drift = std::abs(v.integral() - mass0);
            res.mass_error = std::max(res.mass_error, drift);
            if (drift > opt.mass_tol_per_time * std::max(t, 1.0)) {
                std::ostringstream os;
                os << "solve_density_pde: mass drift " << drift << " at t = " << t
                   << " exceeds tolerance " << opt.mass_tol_per_time << " per unit time";
                throw numeric_error(os.str());
            }
        }
    }
    res.mass_error = std::max(res.mass_error, std::abs(v.integral() - mass0));
    res.final = std::move(v);
    return res;
}

DistanceNorm norm_from_string(const std::string& s) {
    if (s == "l1" || s == "L1") return DistanceNorm::L1;
    if (s == "l2" || s == "L2") return DistanceNorm::L2;
    if (s == "linf" || s == "Linf" || s == "LInf") return DistanceNorm::Linf;
    throw config_error("unknown norm '" + s + "' (expected l1, l2, linf)");
}

std::string to_string(DistanceNorm n) {
    switch (n) {
        case DistanceNorm::L1: return "l1";
        case DistanceNorm::L2: return "l2";
        case DistanceNorm::Linf: return "linf";
    }
    return "?";
}

DensityGrid regrid(const DensityGrid& src, int n_bins, double y_max) {
    if (n_bins < 1 || !(y_max > 0.0)) throw config_error("regrid: invalid target grid");
    DensityGrid g;
    g.y_max = y_max;
    g.values.assign(static_cast<std::size_t>(n_bins), 0.0);
    g.tail_mass = src.tail_mass;
    const double dy_t = g.dy(), dy_s = src.dy();
    for (int i = 0; i < n_bins; ++i) {
        const double lo = static_cast<double>(i) * dy_t;
        const double hi = lo + dy_t;
        // overlap integral with the piecewise-constant source
        const int j0 = std::max(0, static_cast<int>(lo / dy_s));
        double mass = 0.0;
        for (int j = j0; j < src.n_bins(); ++j) {
            const double slo = static_cast<double>(j) * dy_s;
            if (slo >= hi) break;
            const double shi = slo + dy_s;
            const double ov = std::min(hi, shi) - std::max(lo, slo);
            if (ov > 0.0) mass += ov * src.values[static_cast<std::size_t>(j)];
        }
        g.values[static_cast<std::size_t>(i)] = mass / dy_t;
    }
    // mass beyond the target domain joins the tail
    if (src.y_max > y_max) {
        const int j0 = static_cast<int>(y_max / dy_s);
        for (int j = j0; j < src.n_bins(); ++j) {
            const double slo = static_cast<double>(j) * dy_s;
            const double ov = (slo + dy_s) - std::max(y_max, slo);
            if (ov > 0.0) g.tail_mass += ov * src.values[static_cast<std::size_t>(j)];
        }
    }
    return g;
}

double density_distance(const DensityGrid& a, const DensityGrid& b, DistanceNorm norm,
                        bool allow_regrid) {
    const DensityGrid* pb = &b;
    DensityGrid tmp;
    if (a.n_bins() != b.n_bins() || a.y_max != b.y_max) {
        if (!allow_regrid)
            throw config_error("density_distance: mismatched grids (pass allow_regrid to rebin)");
        tmp = regrid(b, a.n_bins(), a.y_max);
        pb = &tmp;
    }
    const double dy = a.dy();
    double acc = 0.0;
    for (int i = 0; i < a.n_bins(); ++i) {
        const double d =
            std::abs(a.values[static_cast<std::size_t>(i)] - pb->values[static_cast<std::size_t>(i)]);
        switch (norm) {
            case DistanceNorm::L1: acc += d * dy; break;
            case DistanceNorm::L2: acc += d * d * dy; break;
            case DistanceNorm::Linf: acc = std::max(acc, d); break;
        }
    }
    return norm == DistanceNorm::L2 ? std::sqrt(acc) : acc;
}

}  // namespace burstpdmp
