#pragma once

#include <cstdint>
#include <vector>

#include "roughfou/fou.hpp"
#include "roughfou/model.hpp"
#include "roughfou/quadrature.hpp"

namespace roughfou {

// Conditional forecast variance convention for the factor given the noise up
// to a grid time.  DiscreteConsistent uses the lattice-exact per-cell sums
// (the law the simulated paths actually follow, so quadrature and nested
// Monte Carlo agree to sampling error); ContinuumKernel uses the continuous
// integral of the squared rescaled kernel, which carries an O((dt/eps)^{2H})
// offset against the lattice.
enum class ConditionalVariance { DiscreteConsistent, ContinuumKernel };

// Realized driving noise up to the conditioning time t = forward_dwy.size()*dt:
// the shared history increments on [-M, 0) plus a forward prefix on [0, t).
struct NoisePrefix {
    std::vector<double> history_dw;   // oldest first, grid.n_history() entries
    std::vector<double> forward_dwy;  // oldest first, t/dt entries
};

struct MomentEstimate {
    double mean = 0.0;
    double std_err = 0.0;
    std::uint64_t n = 0;
};

// Remaining ergodic deviation of the squared Sharpe ratio given the noise to
// time t: phi_t = int_t^T ( E[lambda^2(Y_s) | G_t] - lambda_sq_bar ) ds,
// with the conditional law N(m_s, v_s) evaluated by Gauss-Hermite quadrature
// and the time integral by the left-point grid rule.
double phi_conditional(const NoisePrefix& w, const FouParams& fp, const GridSpec& grid,
                       const MarketModel& m,
                       ConditionalVariance mode = ConditionalVariance::DiscreteConsistent,
                       const QuadratureSpec& spec = {});

// Kernel-weighted conditional forecast of G' = lambda * lambda':
// vartheta_t = int_t^T E[(lambda lambda')(Y_s) | G_t] K^eps(s - t) ds, the
// kernel factor entering through the same cell-integrated weights as the
// simulation, with the conditional expectation at each cell's right edge.
double vartheta(const NoisePrefix& w, const FouParams& fp, const GridSpec& grid,
                const MarketModel& m,
                ConditionalVariance mode = ConditionalVariance::DiscreteConsistent,
                const QuadratureSpec& spec = {});

// E[(int_0^T (lambda^2(Y_s) - lambda_sq_bar) ds)^2] over the set's paths,
// conditionally on the set's history.
MomentEstimate i_second_moment(const FouPathSet& paths, const MarketModel& m,
                               const QuadratureSpec& spec = {});

// Unconditional (stationary) version: independent histories with
// paths_per_history forward paths each; the standard error is taken across
// history means, which is the correct clustering for the shared histories.
MomentEstimate i_second_moment_stationary(const FouParams& fp, const GridSpec& grid,
                                          const MarketModel& m, std::uint64_t n_histories,
                                          std::uint64_t paths_per_history, std::uint64_t seed,
                                          const QuadratureSpec& spec = {});

// Monte Carlo estimate of E[lambda(Y_t) vartheta_t] / sqrt(eps) over
// stationary histories (one forward prefix per history), the simulation-side
// counterpart of the first-order coefficient dbar.
struct DbarMc {
    double value = 0.0;
    double std_err = 0.0;
    std::uint64_t n_histories = 0;
    double eps = 0.0;
    double t = 0.0;
    // closed-form value of the same lattice estimand (tower property turns
    // the conditional quadrature into bivariate normal averages): the MC
    // value must match this within noise, and its distance to the continuum
    // dbar is finite-horizon truncation plus discretization bias
    double lattice_exact = 0.0;
    // continuum dbar minus the analytic tail beyond (T-t)/eps: the dominant
    // truncation correction A(0) * (total_mass - P((T-t)/eps))
    double truncated_continuum = 0.0;
};

DbarMc dbar_mc_estimate(const FouParams& fp, const GridSpec& grid, const MarketModel& m, double t,
                        std::uint64_t n_histories, std::uint64_t seed,
                        ConditionalVariance mode = ConditionalVariance::DiscreteConsistent,
                        const QuadratureSpec& spec = {});

// exact lattice value of E[lambda(Y_t) vartheta_t] / sqrt(eps) (no sampling)
double dbar_mc_exact(const FouParams& fp, const GridSpec& grid, const MarketModel& m, double t,
                     const QuadratureSpec& spec = {});

// Distribution of phi_t over stationary histories: mean (zero in law) and
// L2 norm sqrt(E[phi_t^2]) with delta-method errors.
struct PhiStats {
    double mean = 0.0;
    double mean_se = 0.0;
    double l2 = 0.0;
    double l2_se = 0.0;
    std::uint64_t n_histories = 0;
};

PhiStats phi_stats(const FouParams& fp, const GridSpec& grid, const MarketModel& m, double t,
                   std::uint64_t n_histories, std::uint64_t seed,
                   ConditionalVariance mode = ConditionalVariance::DiscreteConsistent,
                   const QuadratureSpec& spec = {});

// Accumulated first-order remainder kappa_t = int_0^t (vartheta_s lambda(Y_s)
// - sqrt(eps) dbar) ds along simulated paths, evaluated on a coarse grid of
// n_eval times; reports the L2 norm per eval time and its sup over t.
struct KappaReport {
    std::vector<double> t_grid;
    std::vector<double> l2;
    double sup_l2 = 0.0;
    double sup_l2_se = 0.0;
    double ratio_to_sqrt_eps = 0.0;
    std::uint64_t n_scenarios = 0;
};

KappaReport kappa_norm(const FouParams& fp, const GridSpec& grid, const MarketModel& m,
                       double dbar_value, std::uint64_t n_scenarios, std::uint64_t n_eval,
                       std::uint64_t seed,
                       ConditionalVariance mode = ConditionalVariance::DiscreteConsistent,
                       const QuadratureSpec& spec = {});

// ---------------- scaling report ----------------

struct DiagnosticsConfig {
    std::vector<double> eps_grid{0.2, 0.1, 0.05, 0.02};
    std::uint64_t n_histories_i = 64;
    std::uint64_t paths_per_history = 512;
    std::uint64_t n_histories_phi = 400;
    double dbar_mc_eps = 0.01;
    std::uint64_t n_histories_dbar = 2000;
    double t_ref = -1.0;  // reference time for phi and the dbar check; < 0 selects T/2
    ConditionalVariance mode = ConditionalVariance::DiscreteConsistent;
};

struct ErgodicReport {
    std::vector<double> eps_grid;
    std::vector<double> i_sq_mean;
    std::vector<double> i_sq_se;
    std::vector<double> phi_l2;
    std::vector<double> phi_l2_se;
    double slope_i = 0.0;    // log-log regression slope of i_sq_mean on eps
    double slope_phi = 0.0;  // same for phi_l2
    double t_ref = 0.0;
    double dbar_mc_eps = 0.0;
    double dbar_mc = 0.0;
    double dbar_mc_se = 0.0;
    double dbar_lattice_exact = 0.0;
    double dbar_truncated_continuum = 0.0;
    double dbar_quadrature = 0.0;
};

ErgodicReport ergodic_report(const KernelParams& kp, const GridSpec& grid, const MarketModel& m,
                             const DiagnosticsConfig& cfg, std::uint64_t seed,
                             const QuadratureSpec& spec = {});

}  // namespace roughfou
