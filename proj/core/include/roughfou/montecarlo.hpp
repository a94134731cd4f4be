#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "roughfou/asymptotics.hpp"
#include "roughfou/fou.hpp"
#include "roughfou/model.hpp"

namespace roughfou {

// One Monte Carlo value estimate.  `mean` is on the value scale; `raw_mean`
// is the average of the per-path exponential statistic before any outer map.
// The optimal-value estimator applies m -> prefactor * m^q to the sample
// mean, so its std_err is the delta-method transfer of raw_std_err and
// jensen_bias the second-order bias 1/2 f''(m) Var(mean) of that map; both
// are zero-bias linear averages for the strategy estimators.
struct ValueEstimate {
    std::string estimator;
    double mean = 0.0;
    double std_err = 0.0;
    double jensen_bias = 0.0;
    double raw_mean = 0.0;
    double raw_std_err = 0.0;
    std::uint64_t n_paths = 0;
    std::uint64_t seed = 0;
    std::uint64_t history_id = 0;
    double eps = 0.0;
};

// All five value estimates from one sweep over a shared path set, plus the
// standard errors of their pairwise differences on those shared paths (the
// differences are far better resolved than the individual levels).
struct ValueComparison {
    ValueEstimate v_eps;      // optimal value, distorted-expectation form
    ValueEstimate v_pi0;      // myopic-strategy value, direct expectation
    ValueEstimate v_pibar0;   // constant-strategy value
    ValueEstimate w_pi0;      // wealth-equation replay of the myopic strategy
    ValueEstimate w_pibar0;   // wealth-equation replay of the constant strategy
    double se_diff_eps_pi0 = 0.0;     // SE of v_eps.mean - v_pi0.mean
    double se_diff_eps_pibar0 = 0.0;  // SE of v_eps.mean - v_pibar0.mean
    double se_diff_pi0_pibar0 = 0.0;
    double se_diff_pi0_wealth = 0.0;    // SE of v_pi0.mean - w_pi0.mean
    double se_diff_pibar0_wealth = 0.0;
};

// Single sweep computing every per-path statistic at once: the market
// functions are evaluated once per step and shared, so the marginal cost of
// the extra estimators is negligible next to path generation, and the shared
// paths give common random numbers across all comparisons.  Accumulation is
// blockwise (fixed 1024-path blocks, combined in block order with compensated
// summation), so the result is bit-identical for any thread count.
ValueComparison estimate_values(const FouPathSet& paths, const MarketModel& m,
                                const ExpansionCoefficients& coeffs, const Preferences& pref,
                                double x0 = 1.0);

// V^eps at t=0 given the set's history: prefactor * E[exp(c1 I2 + c2 Iy)]^q
// with I2 the time integral of lambda^2, Iy the Ito integral of lambda
// against the factor's own Brownian motion, c1 = (1-gamma)/(2 gamma),
// c2 = rho (1-gamma)/gamma, q the distortion power.
ValueEstimate estimate_v_eps(const FouPathSet& paths, const MarketModel& m,
                             const Preferences& pref, double x0 = 1.0);

// Value of the myopic fraction lambda/(gamma sigma): prefactor * E[exp(
// (1-gamma)(2 gamma - 1)/(2 gamma^2) I2 + (1-gamma)/gamma Iw)] with Iw the
// Ito integral against the stock Brownian motion.
ValueEstimate estimate_v_pi0(const FouPathSet& paths, const MarketModel& m,
                             const Preferences& pref, double x0 = 1.0);

// Value of the constant fraction fbar = mu_bar/(gamma sigma_sq_bar), the
// factor-blind benchmark built from invariant averages.
ValueEstimate estimate_v_pibar0(const FouPathSet& paths, const MarketModel& m,
                                const ExpansionCoefficients& coeffs, const Preferences& pref,
                                double x0 = 1.0);

// Fraction-of-wealth investment rule pi_t = fraction(t, y_t) * X_t.
struct PortfolioRule {
    std::string name;
    std::function<double(double t, double y)> fraction;
};

PortfolioRule myopic_rule(const MarketModel& m, const Preferences& pref);
PortfolioRule constant_mix_rule(double fraction);

// Direct wealth-equation oracle: evolves log X by the left-point scheme
//   dlog X = (f mu - f^2 sigma^2 / 2) dt + f sigma dW
// and returns the average terminal utility.  Fraction rules keep wealth
// positive by construction; a rule returning a non-finite or absurdly large
// fraction is rejected as inadmissible.
ValueEstimate simulate_wealth(const PortfolioRule& rule, const FouPathSet& paths,
                              const MarketModel& m, const Preferences& pref, double x0 = 1.0);

}  // namespace roughfou
