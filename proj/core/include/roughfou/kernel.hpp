#pragma once

#include "roughfou/quadrature.hpp"

namespace roughfou {

// Parameters of the rough mean-reverting moving-average kernel
//
//   K(t) = Gamma(H+1/2)^{-1} [ t^{H-1/2} - a * int_0^t (t-s)^{H-1/2} e^{-a s} ds ],
//
// the unscaled (eps = 1) kernel of the stationary factor.  H in (0, 1/2],
// a > 0.  At H = 1/2 the kernel reduces exactly to e^{-a t}.
struct KernelParams {
    double H = 0.1;
    double a = 1.0;

    void validate() const;  // throws DomainError
};

// K(t) for t > 0.  Diverges like t^{H-1/2} as t -> 0+ when H < 1/2 (returns
// +inf at t = 0).  Not nonnegative: for H < 1/2 the total integral is zero,
// so K changes sign once (positive near 0, negative tail).
double kernel_eval(double t, const KernelParams& kp, const QuadratureSpec& spec = {});

// P(t) = int_0^t K(u) du, exact via the same special function as kernel_eval.
// P rises to a single maximum at the kernel's sign change, then decays to
// kernel_total_mass like t^{H-1/2}.
double kernel_primitive(double t, const KernelParams& kp, const QuadratureSpec& spec = {});

// int_0^inf K(u) du: 0 for H < 1/2 (the Laplace transform z^{1/2-H}/(z+a)
// vanishes at z = 0), and 1/a at H = 1/2.  The jump is the reason the
// H -> 1/2 and eps -> 0 limits of first-order quantities do not commute.
double kernel_total_mass(const KernelParams& kp);

// stationary variance sigma_ou^2 = int_0^inf K^2 = (1/2) a^{-2H} / sin(pi H)
double sigma_ou_sq(const KernelParams& kp);

// int_0^inf K(u)^2 du evaluated by quadrature (independent of the closed form
// above; used to validate the kernel numerics end to end)
double kernel_l2_norm_sq(const KernelParams& kp, const QuadratureSpec& spec = {},
                         double* err_out = nullptr);

// partial energy int_0^t K(u)^2 du; feeds conditional forecast variances and
// the history-truncation bias sigma_ou_sq - kernel_l2_partial(M/eps)
double kernel_l2_partial(double t, const KernelParams& kp, const QuadratureSpec& spec = {});

// normalized stationary autocovariance C_Y(s) = Cov(Y_0, Y_s)/Var(Y),
// C_Y(0) = 1; evaluated from the spectral representation
//   C_Y(s) = (2 sin(pi H)/pi) int_0^inf cos(a s x) x^{1-2H}/(1+x^2) dx.
// Depends on s only through a*s.  For H < 1/2 it integrates to zero over
// [0, inf) and its tail is negative, ~ -c s^{2H-2}.
double cov_stationary(double s, const KernelParams& kp, const QuadratureSpec& spec = {});

}  // namespace roughfou
