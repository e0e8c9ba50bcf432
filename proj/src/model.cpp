#include "burstpdmp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "burstpdmp/errors.hpp"

namespace burstpdmp {

void ModelParams::validate() const {
    if (!(gamma1 > 0.0)) throw config_error("model.gamma1 must be positive");
    if (!(gamma2 > 0.0)) throw config_error("model.gamma2 must be positive");
    if (!(lambda2 > 0.0)) throw config_error("model.lambda2 must be positive");
}

BurstRate BurstRate::constant(double phi0) {
    if (!(phi0 > 0.0)) throw config_error("rate.phi0 must be positive");
    BurstRate r;
    r.kind_ = Kind::Constant;
    r.phi0_ = phi0;
    r.lower_ = r.upper_ = phi0;
    return r;
}

BurstRate BurstRate::hill(double phi0, double K, double A, double B, double n) {
    if (!(phi0 > 0.0)) throw config_error("rate.phi0 must be positive");
    if (!(A > 0.0)) throw config_error("rate.A must be positive");
    if (!(B > 0.0)) throw config_error("rate.B must be positive");
    if (!(K >= 0.0)) throw config_error("rate.K must be nonnegative");
    if (!(n > 0.0)) throw config_error("rate.n must be positive");
    BurstRate r;
    r.kind_ = Kind::Hill;
    r.phi0_ = phi0;
    r.K_ = K;
    r.A_ = A;
    r.B_ = B;
    r.n_ = n;
    // (1 + K u)/(A + B u) is monotone in u = y^n, so the range is spanned by
    // the endpoints u = 0 and u -> inf.
    const double at0 = phi0 / A;
    const double at_inf = phi0 * K / B;
    r.lower_ = std::min(at0, at_inf);
    r.upper_ = std::max(at0, at_inf);
    if (!(r.lower_ > 0.0))
        throw config_error("rate must be strictly positive over [0, inf); got K = 0");
    return r;
}

double BurstRate::eval(double y) const {
    if (y < 0.0) throw std::domain_error("BurstRate: y must be nonnegative");
    if (kind_ == Kind::Constant) return phi0_;
    const double u = std::pow(y, n_);
    return phi0_ * (1.0 + K_ * u) / (A_ + B_ * u);
}

double BurstRate::constant_value() const {
    if (kind_ != Kind::Constant)
        throw config_error("BurstRate: constant_value() on a state-dependent rate");
    return phi0_;
}

BurstRate BurstRate::with_upper_bound(double bound) const {
    if (!(bound >= upper_))
        throw config_error("BurstRate: majorant must dominate the rate everywhere");
    BurstRate r = *this;
    r.upper_ = bound;
    return r;
}

BurstRate BurstRate::scaled_amplitude(double s) const {
    if (!(s > 0.0)) throw config_error("BurstRate: amplitude scale must be positive");
    BurstRate r = *this;
    r.phi0_ *= s;
    r.lower_ *= s;
    r.upper_ *= s;
    return r;
}

JumpDensity JumpDensity::exponential(double mean) {
    if (!(mean > 0.0)) throw config_error("burst.mean must be positive");
    JumpDensity h;
    h.kind_ = Kind::Exponential;
    h.b_ = mean;
    return h;
}

JumpDensity JumpDensity::tabulated(double dy, std::vector<double> values) {
    if (!(dy > 0.0)) throw config_error("burst.dy must be positive");
    if (values.size() < 2) throw config_error("burst.values needs at least 2 nodes");
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v))
            throw config_error("burst.values must be finite and nonnegative");
    }
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        mass += 0.5 * dy * (values[i] + values[i + 1]);
    if (std::abs(mass - 1.0) > 1e-6) {
        std::ostringstream os;
        os << "burst.values integrate to " << mass << ", expected 1 within 1e-6";
        throw config_error(os.str());
    }
    JumpDensity h;
    h.kind_ = Kind::Tabulated;
    h.dy_ = dy;
    h.values_ = std::move(values);
    for (double& v : h.values_) v /= mass;  // renormalize exactly
    h.cdf_.resize(h.values_.size(), 0.0);
    for (std::size_t i = 1; i < h.values_.size(); ++i)
        h.cdf_[i] = h.cdf_[i - 1] + 0.5 * h.dy_ * (h.values_[i - 1] + h.values_[i]);
    h.cdf_.back() = 1.0;
    h.cache_ = std::make_shared<MomentCache>();
    return h;
}

double JumpDensity::exponential_mean() const {
    if (kind_ != Kind::Exponential)
        throw config_error("JumpDensity: exponential_mean() on a tabulated density");
    return b_;
}

double JumpDensity::moment(int j) const {
    if (j < 0) throw config_error("JumpDensity: moment order must be nonnegative");
    if (j == 0) return 1.0;
    if (kind_ == Kind::Exponential) {
        double m = 1.0;
        for (int i = 1; i <= j; ++i) m *= static_cast<double>(i) * b_;
        return m;  // j! b^j
    }
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->vals.find(j);
        if (it != cache_->vals.end()) return it->second;
    }
    double m = 0.0;
    for (std::size_t i = 0; i + 1 < values_.size(); ++i) {
        const double x0 = static_cast<double>(i) * dy_;
        const double x1 = x0 + dy_;
        m += 0.5 * dy_ * (std::pow(x0, j) * values_[i] + std::pow(x1, j) * values_[i + 1]);
    }
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->vals[j] = m;
    return m;
}

double JumpDensity::pdf(double x) const {
    if (x < 0.0) return 0.0;
    if (kind_ == Kind::Exponential) return std::exp(-x / b_) / b_;
    const double pos = x / dy_;
    const auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= values_.size()) return 0.0;
    const double w = pos - static_cast<double>(i);
    return values_[i] * (1.0 - w) + values_[i + 1] * w;
}

double JumpDensity::sample(RngStream& rng) const {
    if (kind_ == Kind::Exponential) return rng.exponential_mean(b_);
    // Inverse CDF for the piecewise-linear density: locate the grid cell by
    // bisection, then solve the per-cell quadratic.
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t i = (it == cdf_.begin()) ? 0 : static_cast<std::size_t>(it - cdf_.begin() - 1);
    if (i + 1 >= values_.size()) i = values_.size() - 2;
    const double r = u - cdf_[i];
    const double f0 = values_[i], f1 = values_[i + 1];
    const double slope = (f1 - f0) / dy_;
    double t;  // offset within the cell, in [0, dy]
    if (std::abs(slope) * dy_ < 1e-12 * std::max(f0, 1e-300)) {
        t = (f0 > 0.0) ? r / f0 : 0.0;
    } else {
        // solve f0 t + slope t^2 / 2 = r for the root in [0, dy]
        const double disc = std::max(f0 * f0 + 2.0 * slope * r, 0.0);
        t = (slope > 0.0) ? (std::sqrt(disc) - f0) / slope
                          : (r > 0.0 ? 2.0 * r / (f0 + std::sqrt(disc)) : 0.0);
    }
    t = std::clamp(t, 0.0, dy_);
    return static_cast<double>(i) * dy_ + t;
}

JumpDensity JumpDensity::scaled_by(double c) const {
    if (!(c > 0.0)) throw config_error("JumpDensity: scale must be positive");
    if (kind_ == Kind::Exponential) return exponential(b_ * c);
    std::vector<double> scaled(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) scaled[i] = values_[i] / c;
    return tabulated(dy_ * c, std::move(scaled));
}

Model2D ScalingFamily::instantiate(double gamma1) const {
    if (!(gamma1 > 0.0)) throw config_error("scaling: gamma1 must be positive");
    base.params.validate();
    if (!(gamma1_ref > 0.0)) throw config_error("scaling: gamma1_ref must be positive");
    const double s = gamma1 / gamma1_ref;
    Model2D m = base;
    m.params.gamma1 = gamma1;
    switch (kind) {
        case ScalingKind::S1:
            m.rate = base.rate.scaled_amplitude(s);
            break;
        case ScalingKind::S2:
            m.burst = base.burst.scaled_by(s);
            break;
        case ScalingKind::S3:
            m.params.lambda2 = base.params.lambda2 * s;
            break;
    }
    return m;
}

std::string to_string(ScalingKind k) {
    switch (k) {
        case ScalingKind::S1: return "S1";
        case ScalingKind::S2: return "S2";
        case ScalingKind::S3: return "S3";
    }
    return "S?";
}

ScalingKind scaling_kind_from_string(const std::string& s) {
    if (s == "S1") return ScalingKind::S1;
    if (s == "S2") return ScalingKind::S2;
    if (s == "S3") return ScalingKind::S3;
    throw config_error("scaling.family must be one of S1, S2, S3; got '" + s + "'");
}

}  // namespace burstpdmp
