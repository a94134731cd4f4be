#include "roughfou/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "roughfou/asymptotics.hpp"
#include "roughfou/errors.hpp"
#include "roughfou/parallel.hpp"
#include "roughfou/rng.hpp"

namespace roughfou {

namespace {

constexpr int kGhNodes = 64;
// stream tag for per-history sub-seeds in stationary (unconditional) sampling
constexpr std::uint64_t kStreamStationary = 0x53544154494f4e59ull;

struct NeumaierSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

double lambda_sq_average(const MarketModel& m, const KernelParams& kp,
                         const QuadratureSpec& spec) {
    const double sd = std::sqrt(sigma_ou_sq(kp));
    return invariant_average(
        [&](double y) {
            const double l = m.lambda(y);
            return l * l;
        },
        sd, spec);
}

// conditional forecast variance per lag j = 0..L
std::vector<double> lag_variances(const std::vector<double>& khat, const FouParams& fp,
                                  const GridSpec& grid, std::int64_t L, ConditionalVariance mode,
                                  const QuadratureSpec& spec) {
    std::vector<double> v(static_cast<std::size_t>(L) + 1, 0.0);
    if (mode == ConditionalVariance::DiscreteConsistent) {
        double acc = 0.0;
        for (std::int64_t j = 1; j <= L; ++j) {
            const double k = khat[static_cast<std::size_t>(j - 1)];
            acc += k * k;
            v[static_cast<std::size_t>(j)] = acc / grid.dt;
        }
    } else {
        for (std::int64_t j = 1; j <= L; ++j) {
            v[static_cast<std::size_t>(j)] =
                kernel_l2_partial(static_cast<double>(j) * grid.dt / fp.eps, fp.kernel, spec);
        }
    }
    return v;
}

// Functionals of one realized window rw (newest increment first): the
// conditional law at lag j is N(m_j, v_j) with m_j a shifted-weight dot
// product against the window, so phi and vartheta come out of one pass of
// Gauss-Hermite sums sharing the lambda evaluations.
struct WindowEngine {
    const std::vector<double>* khat = nullptr;
    const std::vector<double>* vj = nullptr;
    const MarketModel* m = nullptr;
    double dt = 0.0;
    double lambda_sq_bar = 0.0;

    struct Out {
        double y_t = 0.0;
        double vartheta = 0.0;
        double phi = 0.0;
    };

    Out run(const std::vector<double>& rw, std::int64_t L) const {
        const GaussHermite& gh = gauss_hermite(kGhNodes);
        const std::size_t w = rw.size();
        Out o;
        double phi_sum = 0.0, vt_sum = 0.0;
        for (std::int64_t j = 0; j <= L; ++j) {
            const double* kh = khat->data() + j;
            double dot = 0.0;
            for (std::size_t i = 0; i < w; ++i) dot += kh[i] * rw[i];
            const double mj = dot / dt;
            if (j == 0) o.y_t = mj;
            const double sd = std::sqrt((*vj)[static_cast<std::size_t>(j)]);
            double e_l2 = 0.0, e_gp = 0.0;
            for (int i = 0; i < kGhNodes; ++i) {
                const double y = mj + sd * gh.node[i];
                const double lam = m->lambda(y);
                e_l2 += gh.weight[i] * lam * lam;
                e_gp += gh.weight[i] * lam * m->dlambda(y);
            }
            if (j < L) phi_sum += e_l2 - lambda_sq_bar;
            if (j >= 1) vt_sum += e_gp * (*khat)[static_cast<std::size_t>(j - 1)];
        }
        o.phi = phi_sum * dt;
        o.vartheta = vt_sum;
        return o;
    }
};

// history + forward-prefix increments as one reversed window (newest first);
// the forward stream discards the orthogonal member of each Gaussian pair so
// prefixes coincide with the dwy a FouPathSet would produce for path index h
void draw_window(std::uint64_t seed, std::uint64_t h, std::int64_t nh, std::int64_t k, double dt,
                 std::vector<double>& rw) {
    rw.resize(static_cast<std::size_t>(nh + k));
    const double sd = std::sqrt(dt);
    {
        Splitmix64 g = substream(seed, kStreamHistory, h);
        std::int64_t i = 0;
        while (i < nh) {
            const NormalPair p = normal_pair(g);
            rw[static_cast<std::size_t>(k + nh - 1 - i)] = sd * p.z0;
            ++i;
            if (i < nh) {
                rw[static_cast<std::size_t>(k + nh - 1 - i)] = sd * p.z1;
                ++i;
            }
        }
    }
    {
        Splitmix64 g = substream(seed, kStreamForward, h);
        for (std::int64_t j = 0; j < k; ++j) {
            const NormalPair p = normal_pair(g);
            rw[static_cast<std::size_t>(k - 1 - j)] = sd * p.z0;
        }
    }
}

std::vector<double> window_from_prefix(const NoisePrefix& w, const GridSpec& grid) {
    const std::int64_t nh = grid.n_history();
    const std::int64_t n = grid.n_forward();
    if (static_cast<std::int64_t>(w.history_dw.size()) != nh) {
        throw DomainError("NoisePrefix: history length does not match the grid");
    }
    const std::int64_t k = static_cast<std::int64_t>(w.forward_dwy.size());
    if (k > n) throw DomainError("NoisePrefix: forward prefix longer than the grid");
    std::vector<double> rw(static_cast<std::size_t>(nh + k));
    for (std::int64_t i = 0; i < k; ++i) rw[static_cast<std::size_t>(i)] = w.forward_dwy[k - 1 - i];
    for (std::int64_t i = 0; i < nh; ++i) {
        rw[static_cast<std::size_t>(k + i)] = w.history_dw[nh - 1 - i];
    }
    return rw;
}

WindowEngine::Out prefix_functionals(const NoisePrefix& w, const FouParams& fp,
                                     const GridSpec& grid, const MarketModel& m,
                                     ConditionalVariance mode, const QuadratureSpec& spec) {
    fp.validate();
    grid.validate();
    m.validate();
    const std::vector<double> rw = window_from_prefix(w, grid);
    const std::int64_t L = grid.n_forward() - static_cast<std::int64_t>(w.forward_dwy.size());
    const std::vector<double> khat = cell_weights(fp, grid, spec);
    const std::vector<double> vj = lag_variances(khat, fp, grid, L, mode, spec);
    WindowEngine eng{&khat, &vj, &m, grid.dt, lambda_sq_average(m, fp.kernel, spec)};
    return eng.run(rw, L);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

}  // namespace

// ---------------- conditional functionals ----------------

double phi_conditional(const NoisePrefix& w, const FouParams& fp, const GridSpec& grid,
                       const MarketModel& m, ConditionalVariance mode,
                       const QuadratureSpec& spec) {
    return prefix_functionals(w, fp, grid, m, mode, spec).phi;
}

double vartheta(const NoisePrefix& w, const FouParams& fp, const GridSpec& grid,
                const MarketModel& m, ConditionalVariance mode, const QuadratureSpec& spec) {
    return prefix_functionals(w, fp, grid, m, mode, spec).vartheta;
}

// ---------------- time-average deviation ----------------

MomentEstimate i_second_moment(const FouPathSet& paths, const MarketModel& m,
                               const QuadratureSpec& spec) {
    m.validate();
    const double lsb = lambda_sq_average(m, paths.params().kernel, spec);
    const double dt = paths.grid().dt;
    const std::uint64_t n_paths = paths.n_paths();
    const std::int64_t n = paths.grid().n_forward();

    constexpr std::uint64_t kBlock = 256;
    const std::uint64_t n_blocks = (n_paths + kBlock - 1) / kBlock;
    std::vector<double> bsum(n_blocks, 0.0), bsq(n_blocks, 0.0);
    parallel_for(n_blocks, [&](std::uint64_t b) {
        FouPath p;
        double sum = 0.0, sq = 0.0;
        const std::uint64_t lo = b * kBlock;
        const std::uint64_t hi = std::min(n_paths, lo + kBlock);
        for (std::uint64_t i = lo; i < hi; ++i) {
            paths.path(i, p);
            double acc = 0.0;
            for (std::int64_t k = 0; k < n; ++k) {
                const double lam = m.lambda(p.y[static_cast<std::size_t>(k)]);
                acc += lam * lam - lsb;
            }
            const double isq = acc * dt * acc * dt;
            sum += isq;
            sq += isq * isq;
        }
        bsum[b] = sum;
        bsq[b] = sq;
    });
    NeumaierSum s1, s2;
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
        s1.add(bsum[b]);
        s2.add(bsq[b]);
    }
    const double dn = static_cast<double>(n_paths);
    MomentEstimate e;
    e.n = n_paths;
    e.mean = s1.value() / dn;
    const double var = (s2.value() - dn * e.mean * e.mean) / (dn - 1.0);
    e.std_err = std::sqrt(std::max(0.0, var) / dn);
    return e;
}

MomentEstimate i_second_moment_stationary(const FouParams& fp, const GridSpec& grid,
                                          const MarketModel& m, std::uint64_t n_histories,
                                          std::uint64_t paths_per_history, std::uint64_t seed,
                                          const QuadratureSpec& spec) {
    if (n_histories < 2) throw DomainError("i_second_moment_stationary: need >= 2 histories");
    if (paths_per_history < 1) throw DomainError("i_second_moment_stationary: need >= 1 path");
    const double lsb = lambda_sq_average(m, fp.kernel, spec);
    const double dt = grid.dt;
    const std::int64_t n = grid.n_forward();
    std::vector<double> hmean(n_histories, 0.0);
    parallel_for(n_histories, [&](std::uint64_t h) {
        const std::uint64_t seed_h = substream(seed, kStreamStationary, h).state;
        FouPathSet set(fp, grid, paths_per_history, seed_h, h, spec);
        FouPath p;
        double sum = 0.0;
        for (std::uint64_t i = 0; i < paths_per_history; ++i) {
            set.path(i, p);
            double acc = 0.0;
            for (std::int64_t k = 0; k < n; ++k) {
                const double lam = m.lambda(p.y[static_cast<std::size_t>(k)]);
                acc += lam * lam - lsb;
            }
            sum += acc * dt * acc * dt;
        }
        hmean[h] = sum / static_cast<double>(paths_per_history);
    });
    NeumaierSum s1, s2;
    for (double v : hmean) {
        s1.add(v);
        s2.add(v * v);
    }
    const double dn = static_cast<double>(n_histories);
    MomentEstimate e;
    e.n = n_histories * paths_per_history;
    e.mean = s1.value() / dn;
    const double var = (s2.value() - dn * e.mean * e.mean) / (dn - 1.0);
    e.std_err = std::sqrt(std::max(0.0, var) / dn);  // clustered by history
    return e;
}

// ---------------- dbar cross-check ----------------

namespace {

// E[lambda(s1 Z) (lambda lambda')(s2 Z')] for standard normals with
// correlation c and distinct scales (the lattice windows of the two times
// have different truncation lengths, hence different variances)
double bivariate_lambda_gprime(const MarketModel& m, double s1, double s2, double c) {
    const GaussHermite& gh = gauss_hermite(kGhNodes);
    const double root = std::sqrt(std::max(0.0, 1.0 - c * c));
    double s = 0.0;
    for (int i = 0; i < kGhNodes; ++i) {
        const double z = gh.node[i];
        const double outer = gh.weight[i] * m.lambda(s1 * z);
        double inner = 0.0;
        for (int j = 0; j < kGhNodes; ++j) {
            const double y = s2 * (c * z + root * gh.node[j]);
            inner += gh.weight[j] * m.lambda(y) * m.dlambda(y);
        }
        s += outer * inner;
    }
    return s;
}

std::int64_t conditioning_step(const GridSpec& grid, double t) {
    const std::int64_t k = std::llround(t / grid.dt);
    if (k < 0 || k > grid.n_forward()) {
        throw DomainError("diagnostics: conditioning time outside the grid");
    }
    return k;
}

}  // namespace

double dbar_mc_exact(const FouParams& fp, const GridSpec& grid, const MarketModel& m, double t,
                     const QuadratureSpec& spec) {
    fp.validate();
    grid.validate();
    m.validate();
    const std::int64_t k = conditioning_step(grid, t);
    const std::int64_t nh = grid.n_history();
    const std::int64_t n = grid.n_forward();
    const std::int64_t w = k + nh;
    const std::int64_t L = n - k;
    if (w < 1) throw DomainError("dbar_mc_exact: empty conditioning window");
    const std::vector<double> khat = cell_weights(fp, grid, spec);
    const double dt = grid.dt;

    std::vector<double> cum(khat.size() + 1, 0.0);
    for (std::size_t i = 0; i < khat.size(); ++i) cum[i + 1] = cum[i] + khat[i] * khat[i];
    const double var_t = cum[static_cast<std::size_t>(w)] / dt;
    const double s1 = std::sqrt(var_t);

    double acc = 0.0;
    for (std::int64_t j = 1; j <= L; ++j) {
        double dot = 0.0;
        const double* kh = khat.data() + j;
        for (std::int64_t i = 0; i < w; ++i) dot += kh[i] * khat[static_cast<std::size_t>(i)];
        const double cov = dot / dt;
        const double var_tj = cum[static_cast<std::size_t>(j + w)] / dt;
        const double s2 = std::sqrt(var_tj);
        const double c = std::clamp(cov / (s1 * s2), -1.0, 1.0);
        acc += bivariate_lambda_gprime(m, s1, s2, c) * khat[static_cast<std::size_t>(j - 1)];
    }
    return acc / std::sqrt(fp.eps);
}

DbarMc dbar_mc_estimate(const FouParams& fp, const GridSpec& grid, const MarketModel& m, double t,
                        std::uint64_t n_histories, std::uint64_t seed, ConditionalVariance mode,
                        const QuadratureSpec& spec) {
    fp.validate();
    grid.validate();
    m.validate();
    if (n_histories < 2) throw DomainError("dbar_mc_estimate: need >= 2 histories");
    const std::int64_t k = conditioning_step(grid, t);
    const std::int64_t nh = grid.n_history();
    const std::int64_t L = grid.n_forward() - k;
    const std::vector<double> khat = cell_weights(fp, grid, spec);
    const std::vector<double> vj = lag_variances(khat, fp, grid, L, mode, spec);
    const double lsb = lambda_sq_average(m, fp.kernel, spec);
    WindowEngine eng{&khat, &vj, &m, grid.dt, lsb};
    const double rse = std::sqrt(fp.eps);

    constexpr std::uint64_t kBlock = 8;
    const std::uint64_t n_blocks = (n_histories + kBlock - 1) / kBlock;
    std::vector<double> bsum(n_blocks, 0.0), bsq(n_blocks, 0.0);
    parallel_for(n_blocks, [&](std::uint64_t b) {
        std::vector<double> rw;
        double sum = 0.0, sq = 0.0;
        const std::uint64_t lo = b * kBlock;
        const std::uint64_t hi = std::min<std::uint64_t>(n_histories, lo + kBlock);
        for (std::uint64_t h = lo; h < hi; ++h) {
            draw_window(seed, h, nh, k, grid.dt, rw);
            const WindowEngine::Out o = eng.run(rw, L);
            const double stat = m.lambda(o.y_t) * o.vartheta / rse;
            sum += stat;
            sq += stat * stat;
        }
        bsum[b] = sum;
        bsq[b] = sq;
    });
    NeumaierSum s1, s2;
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
        s1.add(bsum[b]);
        s2.add(bsq[b]);
    }
    const double dn = static_cast<double>(n_histories);
    DbarMc r;
    r.n_histories = n_histories;
    r.eps = fp.eps;
    r.t = static_cast<double>(k) * grid.dt;
    r.value = s1.value() / dn;
    const double var = (s2.value() - dn * r.value * r.value) / (dn - 1.0);
    r.std_err = std::sqrt(std::max(0.0, var) / dn);
    r.lattice_exact = dbar_mc_exact(fp, grid, m, t, spec);

    // continuum coefficient cut at the simulated horizon: the tail beyond
    // u0 = (T - t)/eps contributes A(0) (mass - P(u0)), which dominates the
    // gap between the MC estimand and dbar at accessible eps
    const double sd = std::sqrt(sigma_ou_sq(fp.kernel));
    const double a0 = corr_average(m, sd, 0.0, spec);
    const double u0 = static_cast<double>(L) * grid.dt / fp.eps;
    const double db = dbar(m, fp.kernel, spec);
    r.truncated_continuum =
        db - a0 * (kernel_total_mass(fp.kernel) - kernel_primitive(u0, fp.kernel, spec));
    return r;
}

// ---------------- phi statistics ----------------

PhiStats phi_stats(const FouParams& fp, const GridSpec& grid, const MarketModel& m, double t,
                   std::uint64_t n_histories, std::uint64_t seed, ConditionalVariance mode,
                   const QuadratureSpec& spec) {
    fp.validate();
    grid.validate();
    m.validate();
    if (n_histories < 2) throw DomainError("phi_stats: need >= 2 histories");
    const std::int64_t k = conditioning_step(grid, t);
    const std::int64_t nh = grid.n_history();
    const std::int64_t L = grid.n_forward() - k;
    const std::vector<double> khat = cell_weights(fp, grid, spec);
    const std::vector<double> vj = lag_variances(khat, fp, grid, L, mode, spec);
    const double lsb = lambda_sq_average(m, fp.kernel, spec);
    WindowEngine eng{&khat, &vj, &m, grid.dt, lsb};

    constexpr std::uint64_t kBlock = 8;
    const std::uint64_t n_blocks = (n_histories + kBlock - 1) / kBlock;
    std::vector<double> bsum(n_blocks, 0.0), bsq(n_blocks, 0.0), bq4(n_blocks, 0.0);
    parallel_for(n_blocks, [&](std::uint64_t b) {
        std::vector<double> rw;
        double sum = 0.0, sq = 0.0, q4 = 0.0;
        const std::uint64_t lo = b * kBlock;
        const std::uint64_t hi = std::min<std::uint64_t>(n_histories, lo + kBlock);
        for (std::uint64_t h = lo; h < hi; ++h) {
            draw_window(seed, h, nh, k, grid.dt, rw);
            const double phi = eng.run(rw, L).phi;
            sum += phi;
            sq += phi * phi;
            q4 += phi * phi * phi * phi;
        }
        bsum[b] = sum;
        bsq[b] = sq;
        bq4[b] = q4;
    });
    NeumaierSum s1, s2, s4;
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
        s1.add(bsum[b]);
        s2.add(bsq[b]);
        s4.add(bq4[b]);
    }
    const double dn = static_cast<double>(n_histories);
    PhiStats r;
    r.n_histories = n_histories;
    r.mean = s1.value() / dn;
    const double m2 = s2.value() / dn;
    const double var = (s2.value() - dn * r.mean * r.mean) / (dn - 1.0);
    r.mean_se = std::sqrt(std::max(0.0, var) / dn);
    r.l2 = std::sqrt(std::max(0.0, m2));
    // delta method: se(sqrt(m2)) = se(m2) / (2 sqrt(m2))
    const double var_m2 = (s4.value() - dn * m2 * m2) / (dn - 1.0);
    r.l2_se = r.l2 > 0.0 ? std::sqrt(std::max(0.0, var_m2) / dn) / (2.0 * r.l2) : 0.0;
    return r;
}

// ---------------- accumulated remainder ----------------

KappaReport kappa_norm(const FouParams& fp, const GridSpec& grid, const MarketModel& m,
                       double dbar_value, std::uint64_t n_scenarios, std::uint64_t n_eval,
                       std::uint64_t seed, ConditionalVariance mode, const QuadratureSpec& spec) {
    fp.validate();
    grid.validate();
    m.validate();
    if (n_scenarios < 2) throw DomainError("kappa_norm: need >= 2 scenarios");
    const std::int64_t n = grid.n_forward();
    const std::int64_t nh = grid.n_history();
    if (n_eval < 1 || static_cast<std::int64_t>(n_eval) > n) {
        throw DomainError("kappa_norm: n_eval must be in [1, n_forward]");
    }
    std::vector<std::int64_t> idx(n_eval + 1);
    for (std::uint64_t i = 0; i <= n_eval; ++i) {
        idx[i] = std::llround(static_cast<double>(i) * static_cast<double>(n) /
                              static_cast<double>(n_eval));
    }
    const std::vector<double> khat = cell_weights(fp, grid, spec);
    const std::vector<double> vj = lag_variances(khat, fp, grid, n, mode, spec);
    const double lsb = lambda_sq_average(m, fp.kernel, spec);
    WindowEngine eng{&khat, &vj, &m, grid.dt, lsb};
    const double rse = std::sqrt(fp.eps);

    const std::size_t n_pts = idx.size();
    std::vector<std::vector<double>> ksq(n_scenarios, std::vector<double>(n_pts, 0.0));
    parallel_for(n_scenarios, [&](std::uint64_t h) {
        // full forward path for this scenario, then vartheta on the eval grid
        std::vector<double> rw;
        draw_window(seed, h, nh, n, grid.dt, rw);  // rw holds all n forward + history
        std::vector<double> g(n_pts, 0.0);
        std::vector<double> sub;
        for (std::size_t i = 0; i < n_pts; ++i) {
            const std::int64_t k = idx[i];
            // window for conditioning at step k: drop the n-k newest entries
            sub.assign(rw.begin() + (n - k), rw.end());
            const WindowEngine::Out o = eng.run(sub, n - k);
            g[i] = m.lambda(o.y_t) * o.vartheta - rse * dbar_value;
        }
        double kap = 0.0;
        ksq[h][0] = 0.0;
        for (std::size_t i = 1; i < n_pts; ++i) {
            const double dtseg = static_cast<double>(idx[i] - idx[i - 1]) * grid.dt;
            kap += 0.5 * (g[i - 1] + g[i]) * dtseg;
            ksq[h][i] = kap * kap;
        }
    });

    KappaReport r;
    r.n_scenarios = n_scenarios;
    r.t_grid.resize(n_pts);
    r.l2.resize(n_pts);
    const double dn = static_cast<double>(n_scenarios);
    for (std::size_t i = 0; i < n_pts; ++i) {
        r.t_grid[i] = static_cast<double>(idx[i]) * grid.dt;
        NeumaierSum s1, s2;
        for (std::uint64_t h = 0; h < n_scenarios; ++h) {
            s1.add(ksq[h][i]);
            s2.add(ksq[h][i] * ksq[h][i]);
        }
        const double m2 = s1.value() / dn;
        r.l2[i] = std::sqrt(std::max(0.0, m2));
        if (r.l2[i] > r.sup_l2) {
            r.sup_l2 = r.l2[i];
            const double var_m2 = (s2.value() - dn * m2 * m2) / std::max(1.0, dn - 1.0);
            r.sup_l2_se =
                r.l2[i] > 0.0 ? std::sqrt(std::max(0.0, var_m2) / dn) / (2.0 * r.l2[i]) : 0.0;
        }
    }
    r.ratio_to_sqrt_eps = r.sup_l2 / rse;
    return r;
}

// ---------------- scaling report ----------------

ErgodicReport ergodic_report(const KernelParams& kp, const GridSpec& grid, const MarketModel& m,
                             const DiagnosticsConfig& cfg, std::uint64_t seed,
                             const QuadratureSpec& spec) {
    kp.validate();
    grid.validate();
    m.validate();
    if (cfg.eps_grid.empty()) throw DomainError("ergodic_report: eps grid is empty");
    ErgodicReport r;
    r.eps_grid = cfg.eps_grid;
    r.t_ref = cfg.t_ref < 0.0 ? 0.5 * grid.effective_T() : cfg.t_ref;
    for (double eps : cfg.eps_grid) {
        const FouParams fp{kp, eps};
        const MomentEstimate isq = i_second_moment_stationary(
            fp, grid, m, cfg.n_histories_i, cfg.paths_per_history, seed, spec);
        r.i_sq_mean.push_back(isq.mean);
        r.i_sq_se.push_back(isq.std_err);
        const PhiStats ph =
            phi_stats(fp, grid, m, r.t_ref, cfg.n_histories_phi, seed, cfg.mode, spec);
        r.phi_l2.push_back(ph.l2);
        r.phi_l2_se.push_back(ph.l2_se);
    }
    r.slope_i = loglog_slope(r.eps_grid, r.i_sq_mean);
    r.slope_phi = loglog_slope(r.eps_grid, r.phi_l2);

    r.dbar_mc_eps = cfg.dbar_mc_eps;
    const FouParams fpd{kp, cfg.dbar_mc_eps};
    const DbarMc dm = dbar_mc_estimate(fpd, grid, m, r.t_ref, cfg.n_histories_dbar, seed,
                                       cfg.mode, spec);
    r.dbar_mc = dm.value;
    r.dbar_mc_se = dm.std_err;
    r.dbar_lattice_exact = dm.lattice_exact;
    r.dbar_truncated_continuum = dm.truncated_continuum;
    r.dbar_quadrature = dbar(m, kp, spec);
    return r;
}

}  // namespace roughfou
