#pragma once

#include <span>
#include <string>
#include <vector>

#include "burstpdmp/model.hpp"
#include "burstpdmp/reduced.hpp"

namespace burstpdmp {

// Piecewise-constant density on uniform bins [0, y_max).  values[i] is the
// density in bin i; samples past y_max are tracked as tail_mass, so the bin
// integral equals 1 - tail_mass for histograms and 1 after normalize().
struct DensityGrid {
    double y_max = 1.0;
    std::vector<double> values;
    double tail_mass = 0.0;

    int n_bins() const { return static_cast<int>(values.size()); }
    double dy() const { return y_max / static_cast<double>(values.size()); }
    double center(int i) const { return (static_cast<double>(i) + 0.5) * dy(); }
    double integral() const;
    void normalize();  // scales bin mass to exactly 1; throws on zero mass
};

// Normalized histogram of scalar samples; throws numeric_error if every
// sample lands beyond y_max (degenerate histogram).
DensityGrid histogram(std::span<const double> samples, int n_bins, double y_max);

// Closed-form stationary density of the reduced jump process with an
// exponential burst law, mean bb:
//   v(y) = C y^(phi0/(A gamma2) - 1) (A + B y^n)^(phi0 (K - B/A)/(n B gamma2)) e^(-y/bb)
// (constant rates are the B -> 0, K -> 0 degenerate case, a Gamma law).  The
// normalization is computed by adaptive quadrature, with a substitution when
// the y exponent is in (-1, 0).
class StationaryLaw {
  public:
    double pdf(double y) const;
    double log_unnormalized(double y) const;
    double pdf_derivative(double y) const;  // analytic d/dy of pdf

    double y_exponent() const { return a_; }          // exponent on y
    double structure_exponent() const { return c_; }  // exponent on (A + B y^n)
    double burst_mean() const { return bb_; }
    double normalization() const { return C_; }

    double moment(int j) const;           // raw moments by quadrature
    double tail_mass_beyond(double y) const;
    // smallest y with tail mass below the requested bound
    double tail_cutoff(double tail_bound = 1e-6) const;

    // bin-averaged law on a uniform grid (cell averages by quadrature)
    DensityGrid bin_average(int n_bins, double y_max) const;

    const BurstRate& rate() const { return rate_; }
    double gamma2() const { return gamma2_; }

  private:
    friend StationaryLaw analytic_stationary(const ReducedJumpModel& m);
    BurstRate rate_ = BurstRate::constant(1.0);
    double gamma2_ = 1.0;
    double a_ = 0.0;   // y exponent
    double c_ = 0.0;   // structure exponent (0 for constant rates)
    double bb_ = 1.0;  // exponential burst mean
    double C_ = 1.0;
    double y_cut_ = 1.0;  // integration cutoff used for the normalization
};

// Requires an exponential hbar; other burst laws have no closed form here,
// fall back to relaxing solve_density_pde to its steady state.
StationaryLaw analytic_stationary(const ReducedJumpModel& m);

// Pointwise stationary-equation residual of the closed form,
//   d/dy[gamma2 y v] + (phi v * hbar)(y) - phi(y) v(y),
// evaluated with analytic derivatives and adaptive quadrature for the
// convolution.  Independent check that the law actually solves the equation.
double stationary_residual(const StationaryLaw& law, const ReducedJumpModel& m, double y);

struct PdeOptions {
    double cfl = 0.8;
    double dt = 0.0;          // 0 = choose from the CFL constraint
    double mass_tol_per_time = 1e-6;
    std::vector<double> snapshot_times;
};

struct PdeResult {
    DensityGrid final;
    std::vector<DensityGrid> snapshots;
    double mass_error = 0.0;  // max |mass(t) - mass(0)| seen
    long steps = 0;
    double dt_used = 0.0;
    bool dt_reduced = false;  // requested dt violated the CFL bound
};

// Method-of-lines integration of the reduced density equation
//   dv/dt = d/dy[gamma2 y v] + int_0^y phi(z) v(z) hbar(y - z) dz - phi(y) v
// on v0's grid: conservative upwind drift, trapezoid redistribution kernel
// with per-source normalization (jumps conserve mass exactly), explicit Euler
// stepping under a CFL constraint.  First order in dy and dt.
PdeResult solve_density_pde(const DensityGrid& v0, double horizon, const ReducedJumpModel& m,
                            const PdeOptions& opt = {});

enum class DistanceNorm { L1, L2, Linf };

DistanceNorm norm_from_string(const std::string& s);
std::string to_string(DistanceNorm n);

// Distance between piecewise-constant densities on matching grids.  With
// allow_regrid, b is conservatively rebinned onto a's grid first.
double density_distance(const DensityGrid& a, const DensityGrid& b, DistanceNorm norm,
                        bool allow_regrid = false);

// Conservative rebinning onto a uniform target grid (exact bin-mass overlap).
DensityGrid regrid(const DensityGrid& src, int n_bins, double y_max);

}  // namespace burstpdmp
