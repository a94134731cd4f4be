#pragma once

#include "roughfou/kernel.hpp"
#include "roughfou/model.hpp"
#include "roughfou/quadrature.hpp"

namespace roughfou {

// CRRA preferences with stock-factor correlation rho: any gamma > 0 except
// the log case gamma = 1 (the reference experiments use gamma in (0, 1))
struct Preferences {
    double gamma = 0.4;
    double rho = -0.5;

    void validate() const;
};

// distortion power q = gamma / (gamma + (1 - gamma) rho^2)
double q_exponent(const Preferences& pref);

// A(c) = E[ lambda(Y) (lambda lambda')(Y') ] with (Y, Y') centered Gaussian,
// common variance sigma_ou^2, correlation c; tensor Gauss-Hermite with node
// doubling
double corr_average(const MarketModel& m, double sigma_ou, double c,
                    const QuadratureSpec& spec = {});

// First-order coefficient
//   dbar = int_0^inf A(C_Y(s)) K(s) ds,
// evaluated as int_0^S [A(C_Y(s)) - A(0)] K(s) ds + A(0) * total_mass, which
// is exact up to the tail because int_0^inf K is 0 for H < 1/2 (and 1/a at
// H = 1/2).  Plain truncation of the original integrand cannot work: its tail
// carries A(0) P(S) ~ S^{H-1/2}, which decays far too slowly.  Results are
// cached by (model tag, H, a, tolerances).  err_out receives a combined
// quadrature + tail error estimate.
double dbar(const MarketModel& m, const KernelParams& kp, const QuadratureSpec& spec = {},
            double* err_out = nullptr);

// Markov (H = 1/2) counterpart: dbar' = (1/a) int_0^1 A(c) dc with the factor
// variance 1/(2a).  For a self-consistent comparison the model should be one
// built with sigma_ou = 1/sqrt(2a).  dbar at H = 1/2 reduces to this value
// through the same code path as above.
double dbar_prime(const MarketModel& m, double a, const QuadratureSpec& spec = {},
                  double* err_out = nullptr);

// everything the first-order value and strategy approximations need
struct ExpansionCoefficients {
    double lambda_sq_bar = 0.0;
    double mu_bar = 0.0;
    double sigma_sq_bar = 0.0;
    double mu_sq_bar = 0.0;
    double q = 0.0;
    double dbar = 0.0;
    double dbar_err = 0.0;
    double dbar_prime = 0.0;  // Markov reference at the same rate a
};

ExpansionCoefficients expansion_coefficients(const MarketModel& m, const KernelParams& kp,
                                             const Preferences& pref,
                                             const QuadratureSpec& spec = {});

// zeroth-order value v0(t, x) = x^{1-gamma}/(1-gamma) exp((1-gamma) lambda_sq_bar (T-t)/(2 gamma))
double v0(double t, double x, double T, const Preferences& pref, double lambda_sq_bar);

// first-order coefficient v1 = v0 * (1-gamma)^2 (T-t) / gamma^2; the
// first-order value reads v0 + sqrt(eps) rho dbar v1
double v1(double t, double x, double T, const Preferences& pref, double lambda_sq_bar);

double q_eps_approx(double t, double x, double T, const Preferences& pref,
                    double lambda_sq_bar, double dbar_value, double eps);

// myopic fraction of wealth in the stock, lambda(y)/(gamma sigma(y))
double pi0_fraction(double y, const MarketModel& m, const Preferences& pref);

// constant benchmark fraction mu_bar / (gamma sigma_sq_bar)
double pibar0_fraction(const InvariantAverages& avg, const Preferences& pref);

}  // namespace roughfou
