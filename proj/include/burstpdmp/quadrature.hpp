#pragma once

#include <functional>

namespace burstpdmp {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // conservative absolute error estimate
    long evaluations = 0;
};

// Adaptive Gauss-Kronrod (G7, K15) on a finite interval.  Bisects until the
// local error estimate meets max(abs_tol, rel_tol * |integral|), then sums.
// Throws numeric_error with the achieved error if the budget is exhausted.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-10, double abs_tol = 1e-14,
                     long max_evaluations = 2'000'000);

// Same, for integrands behaving like y^alpha * smooth near the left endpoint
// with alpha in (-1, 0): substitutes y = a + u^(1/(1+alpha)) which removes
// the integrable singularity exactly.
QuadResult integrate_left_singular(const std::function<double(double)>& f, double alpha,
                                   double a, double b, double rel_tol = 1e-10,
                                   double abs_tol = 1e-14, long max_evaluations = 2'000'000);

}  // namespace burstpdmp
