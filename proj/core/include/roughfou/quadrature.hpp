#pragma once

#include <functional>
#include <vector>

namespace roughfou {

// Tolerances shared by every numerical integral in the library.  A routine
// succeeds when its error estimate is <= max(abs_tol, rel_tol*|result|),
// otherwise it throws ToleranceError with the achieved error.
struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_subdivisions = 15;
};

// Adaptive Gauss-Kronrod on a finite interval.  err_out (optional) receives
// the error estimate.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec, double* err_out = nullptr);

// Gauss-Hermite rule for E[f(Z)], Z standard normal.  Weights sum to one.
struct GaussHermite {
    std::vector<double> node;
    std::vector<double> weight;
};

// cached; n is the number of nodes
const GaussHermite& gauss_hermite(int n);

// E[f(Z)] by node doubling (n0, 2*n0, ... up to n_max) until two consecutive
// levels agree within spec tolerances.
double expect_normal(const std::function<double(double)>& f, const QuadratureSpec& spec,
                     int n0 = 32, int n_max = 512, double* err_out = nullptr);

}  // namespace roughfou
