#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "burstpdmp/errors.hpp"

namespace burstpdmp {

// Adaptive Dormand-Prince 5(4) integrator for small dense systems.  Used for
// the reduced ODE limit, the moment equations, and as the reference
// integrator the flow formula is checked against.
//
// rhs signature: void(double t, const std::vector<double>& y, std::vector<double>& dydt)

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 2'000'000;
};

struct OdeStepRecord {
    double t;
    std::vector<double> y;
};

template <class Rhs>
std::vector<double> integrate_rk45(Rhs&& rhs, std::vector<double> y, double t0, double t1,
                                   const OdeOptions& opt = {},
                                   std::vector<OdeStepRecord>* record = nullptr) {
    static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double a[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
    };
    // 4th order embedded weights
    static constexpr double b4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695, 393.0 / 640,
                                     -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

    const std::size_t n = y.size();
    if (t1 == t0) return y;
    if (t1 < t0) throw numeric_error("integrate_rk45: backward integration not supported");

    std::vector<std::vector<double>> k(7, std::vector<double>(n));
    std::vector<double> ytmp(n), y5(n), yerr(n);

    double t = t0;
    double h = (t1 - t0) / 100.0;
    rhs(t, y, k[0]);  // FSAL slot

    if (record) record->push_back({t, y});

    for (long step = 0; step < opt.max_steps; ++step) {
        if (t1 - t <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t1)))
            return y;
        h = std::min(h, t1 - t);
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
            throw numeric_error("integrate_rk45: step size underflow at t = " + std::to_string(t));
        }
        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int j = 0; j < s; ++j) acc += a[s][j] * k[j][i];
                ytmp[i] = y[i] + h * acc;
            }
            rhs(t + c[s] * h, ytmp, k[s]);
        }
        // stage 7 state is the 5th order solution (FSAL)
        y5 = ytmp;
        double err_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double e4 = 0.0;
            for (int j = 0; j < 7; ++j) e4 += b4[j] * k[j][i];
            const double e = y5[i] - (y[i] + h * e4);
            const double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            const double q = e / scale;
            err_norm += q * q;
        }
        err_norm = std::sqrt(err_norm / static_cast<double>(n));
        if (err_norm <= 1.0) {
            t += h;
            y = y5;
            k[0] = k[6];
            if (record) record->push_back({t, y});
        }
        const double factor =
            (err_norm == 0.0) ? 5.0
                              : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
        h *= factor;
    }
    throw numeric_error("integrate_rk45: max step budget exhausted");
}

}  // namespace burstpdmp
