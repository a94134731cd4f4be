#include "roughfou/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "roughfou/errors.hpp"

namespace roughfou {

void KernelParams::validate() const {
    if (!(H > 0.0) || !(H <= 0.5)) throw DomainError("KernelParams: H must be in (0, 1/2]");
    if (!(a > 0.0)) throw DomainError("KernelParams: a must be positive");
}

namespace {

// All kernel quantities reduce to the entire function
//
//   F(mu, x) = 1 - x e^{-x} sum_{k>=0} x^k / (k! (mu+k)),   mu > 0, x >= 0,
//
// through K(t) = t^{nu-1} F(nu, at) / Gamma(nu) and
// P(t) = t^nu F(nu+1, at) / Gamma(nu+1), nu = H + 1/2.  F(1, x) = e^{-x}
// exactly, so H = 1/2 needs no special casing.  For large x the Taylor sum
// cancels against the leading 1, so beyond x = 70 we use the exact remainder
// form F = e^{-x} + int_0^x [1 - (1-u/x)^{mu-1}] e^{-u} du truncated at
// u = 60 + log1p(x) (truncation below e^{-60}).

double f_series(double mu, double x) {
    double pk = 1.0;  // x^k / k!
    double s = 1.0 / mu;
    for (int k = 1; k < 400; ++k) {
        pk *= x / k;
        const double add = pk / (mu + k);
        s += add;
        if (add <= 1e-17 * s && k > x) break;
    }
    return 1.0 - x * std::exp(-x) * s;
}

double f_integral(double mu, double x, const QuadratureSpec& spec) {
    const double ucut = 60.0 + std::log1p(x);
    auto g = [mu, x](double u) {
        return -std::expm1((mu - 1.0) * std::log1p(-u / x)) * std::exp(-u);
    };
    QuadratureSpec tight = spec;
    tight.abs_tol = std::min(spec.abs_tol, 1e-14);
    tight.rel_tol = std::min(spec.rel_tol, 1e-12);
    return std::exp(-x) + integrate(g, 0.0, ucut, tight);
}

double f_eval(double mu, double x, const QuadratureSpec& spec) {
    return (x <= 70.0) ? f_series(mu, x) : f_integral(mu, x, spec);
}

// 15-point Gauss-Legendre on [-1,1] via Golub-Welsch, cached
struct GaussLegendre {
    std::vector<double> node, weight;
};

const GaussLegendre& gauss_legendre15() {
    static GaussLegendre gl;
    static std::once_flag once;
    std::call_once(once, [] {
        const int n = 15;
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
        for (int k = 1; k < n; ++k) {
            const double b = k / std::sqrt(4.0 * k * k - 1.0);
            j(k, k - 1) = b;
            j(k - 1, k) = b;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
        gl.node.resize(n);
        gl.weight.resize(n);
        for (int i = 0; i < n; ++i) {
            gl.node[i] = es.eigenvalues()(i);
            const double v0 = es.eigenvectors()(0, i);
            gl.weight[i] = 2.0 * v0 * v0;
        }
    });
    return gl;
}

template <class F>
double gl15(const F& f, double a, double b) {
    const GaussLegendre& gl = gauss_legendre15();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 15; ++i) s += gl.weight[i] * f(c + h * gl.node[i]);
    return h * s;
}

}  // namespace

double kernel_eval(double t, const KernelParams& kp, const QuadratureSpec& spec) {
    kp.validate();
    if (t < 0.0) throw DomainError("kernel_eval: t must be >= 0");
    const double nu = kp.H + 0.5;
    return std::pow(t, nu - 1.0) * f_eval(nu, kp.a * t, spec) / std::tgamma(nu);
}

double kernel_primitive(double t, const KernelParams& kp, const QuadratureSpec& spec) {
    kp.validate();
    if (t < 0.0) throw DomainError("kernel_primitive: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double nu = kp.H + 0.5;
    return std::pow(t, nu) * f_eval(nu + 1.0, kp.a * t, spec) / std::tgamma(nu + 1.0);
}

double kernel_total_mass(const KernelParams& kp) {
    kp.validate();
    return kp.H == 0.5 ? 1.0 / kp.a : 0.0;
}

double sigma_ou_sq(const KernelParams& kp) {
    kp.validate();
    constexpr double pi = 3.141592653589793238462643383280;
    return 0.5 * std::pow(kp.a, -2.0 * kp.H) / std::sin(pi * kp.H);
}

double kernel_l2_norm_sq(const KernelParams& kp, const QuadratureSpec& spec, double* err_out) {
    kp.validate();
    const double nu = kp.H + 0.5;
    const double gamma_nu = std::tgamma(nu);
    double total_err = 0.0;

    // head [0, t1]: substitute w = t^{2H}; K^2 dt = (F(nu, a w^{1/2H})/Gamma(nu))^2 / (2H) dw,
    // which removes the t^{2H-1} singularity exactly
    const double t1 = 1.0 / kp.a;
    const double w1 = std::pow(t1, 2.0 * kp.H);
    double err = 0.0;
    double acc = integrate(
        [&](double w) {
            const double t = std::pow(w, 0.5 / kp.H);
            const double g = f_eval(nu, kp.a * t, spec) / gamma_nu;
            return g * g / (2.0 * kp.H);
        },
        0.0, w1, spec, &err);
    total_err += err;

    // body: dyadic windows out to S = 4096/a
    double lo = t1;
    for (int j = 0; j < 12; ++j) {
        const double hi = 2.0 * lo;
        acc += integrate(
            [&](double t) {
                const double k = kernel_eval(t, kp, spec);
                return k * k;
            },
            lo, hi, spec, &err);
        total_err += err;
        lo = hi;
    }

    // analytic tail from the leading asymptotic K ~ -(1-nu) t^{nu-2}/(a Gamma(nu));
    // next-order correction folded into the error estimate
    const double s = lo;
    const double c = (1.0 - nu) / (kp.a * gamma_nu);
    const double tail = c * c * std::pow(s, 2.0 * nu - 3.0) / (3.0 - 2.0 * nu);
    acc += tail;
    total_err += std::abs(tail) * 8.0 / (kp.a * s);

    if (err_out) *err_out = total_err;
    return acc;
}

double kernel_l2_partial(double t, const KernelParams& kp, const QuadratureSpec& spec) {
    kp.validate();
    if (t < 0.0) throw DomainError("kernel_l2_partial: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double nu = kp.H + 0.5;
    const double gamma_nu = std::tgamma(nu);

    // same head substitution w = u^{2H} as the full norm, stopping at t
    const double t1 = std::min(t, 1.0 / kp.a);
    const double w1 = std::pow(t1, 2.0 * kp.H);
    double acc = integrate(
        [&](double w) {
            const double u = std::pow(w, 0.5 / kp.H);
            const double g = f_eval(nu, kp.a * u, spec) / gamma_nu;
            return g * g / (2.0 * kp.H);
        },
        0.0, w1, spec);
    double lo = t1;
    while (lo < t) {
        const double hi = std::min(t, 2.0 * lo);
        acc += integrate(
            [&](double u) {
                const double k = kernel_eval(u, kp, spec);
                return k * k;
            },
            lo, hi, spec);
        lo = hi;
    }
    return acc;
}

double cov_stationary(double s, const KernelParams& kp, const QuadratureSpec& spec) {
    kp.validate();
    if (s < 0.0) throw DomainError("cov_stationary: s must be >= 0");
    const double b = kp.a * s;
    if (b == 0.0) return 1.0;

    constexpr double pi = 3.141592653589793238462643383280;
    const double h2 = 1.0 - 2.0 * kp.H;  // integrand power x^{h2}
    auto f = [&](double x) { return std::cos(b * x) * std::pow(x, h2) / (1.0 + x * x); };

    // analytic head on [0, delta]: cos(bx)/(1+x^2) = sum_m (-1)^m S_m x^{2m},
    // S_m = sum_{j<=m} b^{2j}/(2j)!, so the x^{h2} weight integrates in closed form
    const double delta = std::min(0.125, 1.0 / (8.0 * std::max(b, 1.0)));
    double head = 0.0;
    {
        double sm = 0.0, bpow = 1.0, sign = 1.0;
        const double d2 = delta * delta;
        double dpow = std::pow(delta, h2 + 1.0);
        for (int m = 0; m <= 10; ++m) {
            sm += bpow;  // now S_m
            head += sign * sm * dpow / (2.0 * m + h2 + 1.0);
            sign = -sign;
            bpow *= b * b / ((2.0 * m + 1.0) * (2.0 * m + 2.0));
            dpow *= d2;
        }
    }

    // base region up to the first cosine zero at or beyond x = 1.6, split into
    // geometric windows below the first zero and half-periods after it
    auto zero = [&](int k) { return (0.5 * pi + k * pi) / b; };
    const double z0 = zero(0);
    int k0 = 0;
    if (z0 < 1.6) k0 = static_cast<int>(std::ceil((1.6 * b - 0.5 * pi) / pi));

    double base = 0.0;
    {
        const int nw = std::max(1, std::min(64, static_cast<int>(std::ceil(std::log2(z0 / delta)))));
        double lo = delta;
        for (int i = 1; i <= nw; ++i) {
            const double hi = delta * std::pow(z0 / delta, static_cast<double>(i) / nw);
            base += gl15(f, lo, hi);
            lo = hi;
        }
        for (int k = 0; k < k0; ++k) base += gl15(f, zero(k), zero(k + 1));
    }

    // tail from x0 = zero(k0) >= 1.6: rotate onto the vertical contour
    // z = x0 + i u/b, valid because x^{h2}/(1+x^2) has no poles with Re z > 0;
    // the oscillation becomes an e^{-u} damping and the integral is smooth
    double tail = 0.0;
    {
        const double x0 = zero(k0);
        const std::complex<double> i01(0.0, 1.0);
        const std::complex<double> rot = i01 * std::exp(i01 * (b * x0)) / b;
        auto fu = [&](double u) {
            const std::complex<double> z(x0, u / b);
            const std::complex<double> g = std::exp(h2 * std::log(z)) / (1.0 + z * z);
            return (rot * std::exp(-u) * g).real();
        };
        QuadratureSpec ts;
        ts.abs_tol = std::min(1e-14, 0.001 * spec.abs_tol);
        ts.rel_tol = 1e-12;
        tail = integrate(fu, 0.0, 45.0, ts);
    }

    return 2.0 * std::sin(pi * kp.H) / pi * (head + base + tail);
}

}  // namespace roughfou
