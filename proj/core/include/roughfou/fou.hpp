#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "roughfou/kernel.hpp"
#include "roughfou/quadrature.hpp"

namespace roughfou {

// Simulation grid: forward horizon [0, T] with step dt, plus a finite history
// window of the given length (time units) feeding the moving average.  A
// negative history selects the default sqrt(T/dt) time units, which balances
// the truncation bias against the step count.  Requested lengths are rounded
// to whole steps; effective_* report the values actually used.
struct GridSpec {
    double T = 1.0;
    double dt = 1e-3;
    double history = -1.0;

    void validate() const;
    double resolved_history() const;
    std::int64_t n_forward() const;
    std::int64_t n_history() const;
    double effective_T() const { return static_cast<double>(n_forward()) * dt; }
    double effective_history() const { return static_cast<double>(n_history()) * dt; }
};

struct FouParams {
    KernelParams kernel;
    double eps = 0.1;  // time-scale separation

    void validate() const;
};

// Cell-integrated weights of the fast kernel K^eps(t) = eps^{-1/2} K(t/eps):
//   Khat_j = sqrt(eps) * (P((j+1) dt/eps) - P(j dt/eps)),
// j = 0 .. n_history + n_forward - 1, exact via the kernel primitive.  Their
// sum telescopes to sqrt(eps) P((T + history)/eps).  For H < 1/2 the weights
// change sign once (the kernel's zero crossing); they are not all positive.
std::vector<double> cell_weights(const FouParams& fp, const GridSpec& grid,
                                 const QuadratureSpec& spec = {});

// Exact second moments of the discretized stationary factor implied by the
// weights: Y_k = (1/dt) sum_j Khat_j dW_{k-1-j} with iid N(0, dt) increments.
// These are the population values the sampled paths must reproduce; they sit
// below the continuum values sigma_ou_sq / C_Y by an O((dt/eps)^{2H}) bias.
double discrete_variance(const std::vector<double>& khat, double dt);
double discrete_covariance(const std::vector<double>& khat, double dt, std::int64_t lag);

// Worst-case stationary variance neglected by cutting the moving average at
// the history horizon: int_M^inf (K^eps)^2 = sigma_ou_sq - int_0^{M/eps} K^2,
// attained at t = 0 and decaying as the window grows with t.  Tests widen
// their tolerances by this amount when comparing sampled moments to the
// continuum values.
double history_truncation_variance(const FouParams& fp, const GridSpec& grid,
                                   const QuadratureSpec& spec = {});

// One realized past of the driving noise and the forward drift it induces:
// drift[k] = (1/dt) sum_{m} Khat_{k+m} dw[n_history-1-m] for k = 0..n_forward.
struct FouHistory {
    std::uint64_t history_id = 0;
    std::vector<double> dw;     // n_history increments, oldest first
    std::vector<double> drift;  // n_forward + 1 values
};

struct FouPath {
    std::vector<double> y;    // factor at t_k, k = 0..n_forward
    std::vector<double> dwy;  // driving increments, k = 0..n_forward-1
    std::vector<double> dwp;  // orthogonal increments, same shape
};

// Streaming path generator.  Stores only the weights and the history; path i
// is materialized on demand as a pure function of (seed, i), so sets built
// with the same seed share driving noise across eps values, histories, and
// estimators (common random numbers).  Long grids (>= 4096 forward steps)
// switch the per-path convolution to FFT.
class FouPathSet {
public:
    FouPathSet(const FouParams& fp, const GridSpec& grid, std::uint64_t n_paths,
               std::uint64_t seed, std::uint64_t history_id,
               const QuadratureSpec& spec = {});
    ~FouPathSet();

    FouPathSet(const FouPathSet&) = delete;
    FouPathSet& operator=(const FouPathSet&) = delete;

    const FouParams& params() const { return params_; }
    const GridSpec& grid() const { return grid_; }
    std::uint64_t n_paths() const { return n_paths_; }
    std::uint64_t seed() const { return seed_; }
    const FouHistory& history() const { return history_; }
    const std::vector<double>& weights() const { return khat_; }

    void path(std::uint64_t i, FouPath& out) const;
    FouPath path(std::uint64_t i) const;

private:
    void forward_convolve(const std::vector<double>& dwy, std::vector<double>& f) const;

    FouParams params_;
    GridSpec grid_;
    std::uint64_t n_paths_;
    std::uint64_t seed_;
    FouHistory history_;
    std::vector<double> khat_;
    std::vector<double> wfwd_;  // Khat_j / dt, j < n_forward
    struct Fft;
    Fft* fft_ = nullptr;  // set when the FFT path is active
};

// Binary path dump, little-endian doubles, layout:
//   "RFOUPATH" | u32 version=1 | u32 endian=1
//   f64 H, a, eps, T, dt, history_len | u64 n_forward, n_history, n_paths,
//   seed, history_id | history dw | per path: dwy, dwp, y
void dump_paths(const FouPathSet& set, std::ostream& os, std::uint64_t n_dump);

struct PathDump {
    FouParams params;
    GridSpec grid;
    std::uint64_t seed = 0;
    std::uint64_t history_id = 0;
    std::vector<double> history_dw;
    std::vector<FouPath> paths;
};

PathDump load_paths(std::istream& is);

}  // namespace roughfou
