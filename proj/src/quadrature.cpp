#include "burstpdmp/quadrature.hpp"

#include <cmath>
#include <sstream>

#include "burstpdmp/errors.hpp"

namespace burstpdmp {
namespace {

// G7/K15 nodes and weights (positive half; node 0 is the midpoint).
constexpr double kron_nodes[8] = {
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
};
constexpr double kron_weights[8] = {
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
};
// Gauss-7 weights attach to kron_nodes indices 0, 2, 4, 6.
constexpr double gauss_weights[4] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
};

struct Panel {
    double val;
    double err;
};

Panel gk15(const std::function<double(double)>& f, double a, double b, long& evals) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    evals += 15;
    double kron = kron_weights[0] * fc;
    double gauss = gauss_weights[0] * fc;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * kron_nodes[i];
        const double fsum = f(c - dx) + f(c + dx);
        kron += kron_weights[i] * fsum;
        if (i % 2 == 0) gauss += gauss_weights[i / 2] * fsum;
    }
    kron *= h;
    gauss *= h;
    return {kron, std::abs(kron - gauss)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double rel_tol,
             double abs_tol, long max_evals, long& evals, double& err_acc, int depth) {
    Panel p = gk15(f, a, b, evals);
    const double tol = std::max(abs_tol, rel_tol * std::abs(p.val));
    if (p.err <= tol || depth >= 60) {
        err_acc += p.err;
        return p.val;
    }
    if (evals > max_evals) {
        std::ostringstream os;
        os << "quadrature did not converge: " << evals << " evaluations, residual error estimate "
           << p.err << " on [" << a << ", " << b << "]";
        throw numeric_error(os.str());
    }
    const double c = 0.5 * (a + b);
    return adapt(f, a, c, rel_tol, abs_tol, max_evals, evals, err_acc, depth + 1) +
           adapt(f, c, b, rel_tol, abs_tol, max_evals, evals, err_acc, depth + 1);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                     double abs_tol, long max_evaluations) {
    QuadResult r;
    if (a == b) return r;
    double err = 0.0;
    long evals = 0;
    r.value = adapt(f, a, b, rel_tol, abs_tol, max_evaluations, evals, err, 0);
    r.error = err;
    r.evaluations = evals;
    return r;
}

QuadResult integrate_left_singular(const std::function<double(double)>& f, double alpha, double a,
                                   double b, double rel_tol, double abs_tol,
                                   long max_evaluations) {
    if (!(alpha > -1.0 && alpha < 0.0)) {
        return integrate(f, a, b, rel_tol, abs_tol, max_evaluations);
    }
    // y = a + u^p with p = 1/(1+alpha): (y-a)^alpha dy = p du near u = 0.
    const double p = 1.0 / (1.0 + alpha);
    const double u_max = std::pow(b - a, 1.0 / p);
    auto g = [&](double u) {
        const double y = a + std::pow(u, p);
        return f(y) * p * std::pow(u, p - 1.0);
    };
    return integrate(g, 0.0, u_max, rel_tol, abs_tol, max_evaluations);
}

}  // namespace burstpdmp
