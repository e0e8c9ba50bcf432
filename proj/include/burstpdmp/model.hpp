#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "burstpdmp/rng.hpp"

namespace burstpdmp {

// Two-component bursting process:
//   dX/dt = -gamma1 X + bursts(size ~ h, rate phi(Y))
//   dY/dt = -gamma2 Y + lambda2 X
struct ModelParams {
    double gamma1 = 1.0;   // burst-variable decay rate
    double gamma2 = 1.0;   // output-variable decay rate
    double lambda2 = 1.0;  // production of Y per unit X

    void validate() const;  // throws config_error on nonpositive rates
};

// State-dependent burst rate phi(y).  Either a Hill response
//   phi(y) = phi0 (1 + K y^n) / (A + B y^n)
// or a constant.  The Hill form is monotone in y^n (the sign of K A - B is
// fixed), so its range is exactly [min, max] of the two endpoint values
// phi(0) = phi0/A and lim phi = phi0 K / B; those certified bounds drive the
// thinning sampler.
class BurstRate {
  public:
    enum class Kind { Constant, Hill };

    static BurstRate constant(double phi0);
    static BurstRate hill(double phi0, double K, double A, double B, double n);

    double operator()(double y) const { return eval(y); }
    double eval(double y) const;  // throws std::domain_error for y < 0

    double lower_bound() const { return lower_; }
    double upper_bound() const { return upper_; }
    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::Constant; }

    // Constant value accessor; only valid for Kind::Constant.
    double constant_value() const;

    double phi0() const { return phi0_; }
    double K() const { return K_; }
    double A() const { return A_; }
    double B() const { return B_; }
    double n() const { return n_; }

    // Same rate with an inflated thinning majorant (>= current upper bound);
    // lets callers exercise rejection even for flat rates.
    BurstRate with_upper_bound(double bound) const;

    // Rate with phi0 multiplied by s (used by the S1 scaling family).
    BurstRate scaled_amplitude(double s) const;

  private:
    BurstRate() = default;
    Kind kind_ = Kind::Constant;
    double phi0_ = 1.0, K_ = 0.0, A_ = 1.0, B_ = 0.0, n_ = 1.0;
    double lower_ = 0.0, upper_ = 0.0;
};

// Burst size density h on (0, inf).  Exponential(mean b) or a tabulated
// density on a uniform grid starting at 0.  Instances are immutable and safe
// to share across threads (the moment cache is internally synchronized).
class JumpDensity {
  public:
    enum class Kind { Exponential, Tabulated };

    static JumpDensity exponential(double mean);
    // values[i] = density at i * dy; validated nonnegative, trapezoid mass
    // within 1e-6 of one, then renormalized exactly.
    static JumpDensity tabulated(double dy, std::vector<double> values);

    Kind kind() const { return kind_; }
    bool is_exponential() const { return kind_ == Kind::Exponential; }
    double mean() const { return moment(1); }
    double exponential_mean() const;  // only valid for Kind::Exponential

    // j-th raw moment.  Exponential: exact j! b^j.  Tabulated: trapezoid on
    // the grid, memoized.
    double moment(int j) const;

    double pdf(double x) const;
    double sample(RngStream& rng) const;

    // Density of c * Delta for c > 0: (1/c) h(x / c).  This is the burst-size
    // transformation used by both the S2 family and the reduced Y process.
    JumpDensity scaled_by(double c) const;

    double grid_dy() const { return dy_; }
    const std::vector<double>& grid_values() const { return values_; }

  private:
    JumpDensity() = default;
    Kind kind_ = Kind::Exponential;
    double b_ = 1.0;

    double dy_ = 0.0;
    std::vector<double> values_;
    std::vector<double> cdf_;  // trapezoid CDF at grid nodes, ends at 1

    struct MomentCache {
        std::mutex mu;
        std::map<int, double> vals;
    };
    std::shared_ptr<MomentCache> cache_;
};

// Full two-variable model bundle.
struct Model2D {
    ModelParams params;
    BurstRate rate;
    JumpDensity burst;
};

// One-parameter families over gamma1 that keep the stationary mean of Y
// fixed (for constant rates):
//   S1: phi proportional to gamma1, h and lambda2 fixed
//   S2: burst mean proportional to gamma1 (h(d) = h0(d/s)/s), phi and lambda2 fixed
//   S3: lambda2 proportional to gamma1, phi and h fixed
enum class ScalingKind { S1, S2, S3 };

struct ScalingFamily {
    ScalingKind kind = ScalingKind::S2;
    Model2D base;
    double gamma1_ref = 1.0;  // gamma1 at which base holds

    Model2D instantiate(double gamma1) const;  // validates gamma1 > 0
};

std::string to_string(ScalingKind k);
ScalingKind scaling_kind_from_string(const std::string& s);

}  // namespace burstpdmp
