#include "roughfou/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "roughfou/errors.hpp"
#include "roughfou/parallel.hpp"

namespace roughfou {

namespace {

// ---------------- blocked deterministic accumulation ----------------

constexpr std::uint64_t kBlock = 1024;
constexpr int kStats = 5;    // a, b, c, wa, wb
constexpr int kCross = 15;   // upper triangle of the 5x5 second moments

int cross_index(int j, int k) { return j * kStats - j * (j - 1) / 2 + (k - j); }

struct BlockSums {
    double s1[kStats] = {};
    double s2[kCross] = {};
    double dsq[2] = {};  // sums of (b - wa)^2 and (c - wb)^2, cancellation-free
};

struct NeumaierSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double t = s + x;
        c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

struct SweepCoeffs {
    double dt = 0.0;
    double rho = 0.0, rho_c = 0.0;
    double gamma = 0.0, og = 0.0;  // og = 1 - gamma
    double ce1 = 0.0, ce2 = 0.0;   // distorted-expectation exponent
    double cb1 = 0.0, cb2 = 0.0;   // myopic-strategy exponent
    double cc1 = 0.0, cc2 = 0.0, cc3 = 0.0;  // constant-strategy exponent
    double fbar = 0.0;
};

void path_stats(const FouPath& p, const MarketModel& m, const SweepCoeffs& sc,
                std::uint64_t index, double out[kStats]) {
    const std::size_t n = p.dwy.size();
    double i_l2 = 0.0, i_y = 0.0, i_w = 0.0;
    double i_mu = 0.0, i_s2 = 0.0, i_sw = 0.0;
    double wl0 = 0.0, wlb = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double y = p.y[k];
        const double lam = m.lambda(y);
        const double mu = m.mu(y);
        const double sig = m.sigma(y);
        const double dwy = p.dwy[k];
        const double dw = sc.rho * dwy + sc.rho_c * p.dwp[k];
        i_l2 += lam * lam;
        i_y += lam * dwy;
        i_w += lam * dw;
        i_mu += mu;
        i_s2 += sig * sig;
        i_sw += sig * dw;
        // wealth-equation replays recombine mu and sigma on their own, so they
        // exercise a genuinely different code path than the exponent formulas
        const double f0 = lam / (sc.gamma * sig);
        wl0 += (f0 * mu - 0.5 * f0 * f0 * sig * sig) * sc.dt + f0 * sig * dw;
        wlb += (sc.fbar * mu - 0.5 * sc.fbar * sc.fbar * sig * sig) * sc.dt +
               sc.fbar * sig * dw;
    }
    out[0] = std::exp(sc.ce1 * i_l2 * sc.dt + sc.ce2 * i_y);
    out[1] = std::exp(sc.cb1 * i_l2 * sc.dt + sc.cb2 * i_w);
    out[2] = std::exp(sc.cc1 * i_mu * sc.dt + sc.cc2 * i_s2 * sc.dt + sc.cc3 * i_sw);
    out[3] = std::exp(sc.og * wl0);
    out[4] = std::exp(sc.og * wlb);
    for (int j = 0; j < kStats; ++j) {
        if (!std::isfinite(out[j])) {
            char msg[96];
            std::snprintf(msg, sizeof(msg), "value statistic overflowed on path %llu",
                          static_cast<unsigned long long>(index));
            throw EstimatorError(msg);
        }
    }
}

ValueEstimate make_linear(const char* name, double pf, double mean, double var_of_mean,
                          const FouPathSet& paths) {
    ValueEstimate e;
    e.estimator = name;
    e.raw_mean = mean;
    e.raw_std_err = std::sqrt(std::max(0.0, var_of_mean));
    e.mean = pf * mean;
    e.std_err = std::abs(pf) * e.raw_std_err;
    e.jensen_bias = 0.0;
    e.n_paths = paths.n_paths();
    e.seed = paths.seed();
    e.history_id = paths.history().history_id;
    e.eps = paths.params().eps;
    return e;
}

ValueComparison sweep(const FouPathSet& paths, const MarketModel& m, double fbar,
                      const Preferences& pref, double x0) {
    pref.validate();
    m.validate();
    if (!(x0 > 0.0)) throw DomainError("estimate: initial wealth must be positive");
    const std::uint64_t n = paths.n_paths();
    if (n < 2) throw DomainError("estimate: need at least two paths");

    SweepCoeffs sc;
    const double g = pref.gamma;
    sc.dt = paths.grid().dt;
    sc.rho = pref.rho;
    sc.rho_c = std::sqrt(std::max(0.0, 1.0 - pref.rho * pref.rho));
    sc.gamma = g;
    sc.og = 1.0 - g;
    sc.ce1 = (1.0 - g) / (2.0 * g);
    sc.ce2 = pref.rho * (1.0 - g) / g;
    sc.cb1 = (1.0 - g) * (2.0 * g - 1.0) / (2.0 * g * g);
    sc.cb2 = (1.0 - g) / g;
    sc.fbar = fbar;
    sc.cc1 = (1.0 - g) * fbar;
    sc.cc2 = -0.5 * (1.0 - g) * fbar * fbar;
    sc.cc3 = (1.0 - g) * fbar;

    const std::uint64_t n_blocks = (n + kBlock - 1) / kBlock;
    std::vector<BlockSums> blocks(n_blocks);
    parallel_for(n_blocks, [&](std::uint64_t b) {
        BlockSums& bs = blocks[b];
        FouPath p;
        double s[kStats];
        const std::uint64_t lo = b * kBlock;
        const std::uint64_t hi = std::min(n, lo + kBlock);
        for (std::uint64_t i = lo; i < hi; ++i) {
            paths.path(i, p);
            path_stats(p, m, sc, i, s);
            for (int j = 0; j < kStats; ++j) {
                bs.s1[j] += s[j];
                for (int k = j; k < kStats; ++k) bs.s2[cross_index(j, k)] += s[j] * s[k];
            }
            const double db = s[1] - s[3];
            const double dc = s[2] - s[4];
            bs.dsq[0] += db * db;
            bs.dsq[1] += dc * dc;
        }
    });

    // combine in block order: bit-identical for any worker count
    NeumaierSum s1[kStats], s2[kCross], dsq[2];
    for (const BlockSums& bs : blocks) {
        for (int j = 0; j < kStats; ++j) s1[j].add(bs.s1[j]);
        for (int j = 0; j < kCross; ++j) s2[j].add(bs.s2[j]);
        dsq[0].add(bs.dsq[0]);
        dsq[1].add(bs.dsq[1]);
    }

    const double dn = static_cast<double>(n);
    double mean[kStats];
    for (int j = 0; j < kStats; ++j) mean[j] = s1[j].value() / dn;
    double cov[kStats][kStats];  // covariance of the sample means
    for (int j = 0; j < kStats; ++j) {
        for (int k = j; k < kStats; ++k) {
            const double c = (s2[cross_index(j, k)].value() - dn * mean[j] * mean[k]) /
                             ((dn - 1.0) * dn);
            cov[j][k] = cov[k][j] = c;
        }
    }

    const double pf = std::pow(x0, 1.0 - g) / (1.0 - g);
    const double q = q_exponent(pref);

    ValueComparison r;
    // distorted estimator: value = pf * mean^q, delta-method error transfer
    {
        ValueEstimate e = make_linear("v_eps", pf, mean[0], cov[0][0], paths);
        const double mq = std::pow(mean[0], q);
        const double dmap = pf * q * mq / mean[0];
        e.mean = pf * mq;
        e.std_err = std::abs(dmap) * e.raw_std_err;
        e.jensen_bias = 0.5 * pf * q * (q - 1.0) * mq / (mean[0] * mean[0]) * cov[0][0];
        r.v_eps = e;
    }
    r.v_pi0 = make_linear("v_pi0", pf, mean[1], cov[1][1], paths);
    r.v_pibar0 = make_linear("v_pibar0", pf, mean[2], cov[2][2], paths);
    r.w_pi0 = make_linear("wealth_pi0", pf, mean[3], cov[3][3], paths);
    r.w_pibar0 = make_linear("wealth_pibar0", pf, mean[4], cov[4][4], paths);

    const double dmap0 = pf * q * std::pow(mean[0], q - 1.0);
    auto diff_se = [&](double ga, double gb, int ia, int ib) {
        const double v = ga * ga * cov[ia][ia] + gb * gb * cov[ib][ib] +
                         2.0 * ga * gb * cov[ia][ib];
        return std::sqrt(std::max(0.0, v));
    };
    r.se_diff_eps_pi0 = diff_se(dmap0, -pf, 0, 1);
    r.se_diff_eps_pibar0 = diff_se(dmap0, -pf, 0, 2);
    r.se_diff_pi0_pibar0 = diff_se(pf, -pf, 1, 2);
    // estimator-vs-wealth gaps are near machine zero, so their variances are
    // formed from directly accumulated squared differences
    auto paired_se = [&](int j, double dsq_sum) {
        const double d = mean[j] - mean[j + 2];
        const double v = (dsq_sum - dn * d * d) / ((dn - 1.0) * dn);
        return std::abs(pf) * std::sqrt(std::max(0.0, v));
    };
    r.se_diff_pi0_wealth = paired_se(1, dsq[0].value());
    r.se_diff_pibar0_wealth = paired_se(2, dsq[1].value());
    return r;
}

}  // namespace

// ---------------- public estimators ----------------

ValueComparison estimate_values(const FouPathSet& paths, const MarketModel& m,
                                const ExpansionCoefficients& coeffs, const Preferences& pref,
                                double x0) {
    if (!(coeffs.sigma_sq_bar > 0.0)) {
        throw DomainError("estimate_values: sigma_sq_bar must be positive");
    }
    const double fbar = coeffs.mu_bar / (pref.gamma * coeffs.sigma_sq_bar);
    return sweep(paths, m, fbar, pref, x0);
}

ValueEstimate estimate_v_eps(const FouPathSet& paths, const MarketModel& m,
                             const Preferences& pref, double x0) {
    return sweep(paths, m, 0.0, pref, x0).v_eps;
}

ValueEstimate estimate_v_pi0(const FouPathSet& paths, const MarketModel& m,
                             const Preferences& pref, double x0) {
    return sweep(paths, m, 0.0, pref, x0).v_pi0;
}

ValueEstimate estimate_v_pibar0(const FouPathSet& paths, const MarketModel& m,
                                const ExpansionCoefficients& coeffs, const Preferences& pref,
                                double x0) {
    return estimate_values(paths, m, coeffs, pref, x0).v_pibar0;
}

// ---------------- wealth-equation oracle ----------------

PortfolioRule myopic_rule(const MarketModel& m, const Preferences& pref) {
    pref.validate();
    const double g = pref.gamma;
    PortfolioRule r;
    r.name = "myopic";
    r.fraction = [m, g](double, double y) { return m.lambda(y) / (g * m.sigma(y)); };
    return r;
}

PortfolioRule constant_mix_rule(double fraction) {
    char name[48];
    std::snprintf(name, sizeof(name), "constant-mix(%.12g)", fraction);
    PortfolioRule r;
    r.name = name;
    r.fraction = [fraction](double, double) { return fraction; };
    return r;
}

ValueEstimate simulate_wealth(const PortfolioRule& rule, const FouPathSet& paths,
                              const MarketModel& m, const Preferences& pref, double x0) {
    pref.validate();
    m.validate();
    if (!(x0 > 0.0)) throw DomainError("simulate_wealth: initial wealth must be positive");
    if (!rule.fraction) throw DomainError("simulate_wealth: rule has no fraction function");
    const std::uint64_t n_paths = paths.n_paths();
    if (n_paths < 2) throw DomainError("simulate_wealth: need at least two paths");

    const double dt = paths.grid().dt;
    const double rho = pref.rho;
    const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const double og = 1.0 - pref.gamma;

    const std::uint64_t n_blocks = (n_paths + kBlock - 1) / kBlock;
    std::vector<double> bsum(n_blocks, 0.0), bsq(n_blocks, 0.0);
    parallel_for(n_blocks, [&](std::uint64_t b) {
        FouPath p;
        double sum = 0.0, sq = 0.0;
        const std::uint64_t lo = b * kBlock;
        const std::uint64_t hi = std::min(n_paths, lo + kBlock);
        for (std::uint64_t i = lo; i < hi; ++i) {
            paths.path(i, p);
            const std::size_t n = p.dwy.size();
            double lx = 0.0;  // log X_t - log x0
            for (std::size_t k = 0; k < n; ++k) {
                const double t = static_cast<double>(k) * dt;
                const double y = p.y[k];
                const double f = rule.fraction(t, y);
                if (!std::isfinite(f) || std::abs(f) > 1e6) {
                    throw EstimatorError("simulate_wealth: inadmissible fraction from rule '" +
                                         rule.name + "'");
                }
                const double mu = m.mu(y);
                const double sig = m.sigma(y);
                const double dw = rho * p.dwy[k] + rho_c * p.dwp[k];
                lx += (f * mu - 0.5 * f * f * sig * sig) * dt + f * sig * dw;
            }
            const double u = std::exp(og * lx);
            if (!std::isfinite(u)) {
                char msg[96];
                std::snprintf(msg, sizeof(msg), "simulate_wealth: utility overflowed on path %llu",
                              static_cast<unsigned long long>(i));
                throw EstimatorError(msg);
            }
            sum += u;
            sq += u * u;
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
    const double mean = s1.value() / dn;
    const double var_of_mean = (s2.value() - dn * mean * mean) / ((dn - 1.0) * dn);
    const double pf = std::pow(x0, og) / og;

    ValueEstimate e;
    e.estimator = "wealth_" + rule.name;
    e.raw_mean = mean;
    e.raw_std_err = std::sqrt(std::max(0.0, var_of_mean));
    e.mean = pf * mean;
    e.std_err = std::abs(pf) * e.raw_std_err;
    e.n_paths = n_paths;
    e.seed = paths.seed();
    e.history_id = paths.history().history_id;
    e.eps = paths.params().eps;
    return e;
}

}  // namespace roughfou
