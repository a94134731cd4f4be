#include "roughfou/model.hpp"

#include <cmath>
#include <cstdio>

#include "roughfou/errors.hpp"

namespace roughfou {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }
double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

}  // namespace

void MarketModel::validate() const {
    if (!(sigma_lo > 0.0)) throw DomainError("MarketModel: sigma must be bounded away from 0");
    if (!(sigma_hi >= sigma_lo)) throw DomainError("MarketModel: inconsistent sigma bounds");
    if (!mu || !sigma || !lambda || !dlambda) throw DomainError("MarketModel: missing coefficient");
}

MarketModel gaussian_sharpe_model(double sigma_ou) {
    if (!(sigma_ou > 0.0)) throw DomainError("gaussian_sharpe_model: sigma_ou must be positive");
    MarketModel m;
    {
        char tag[64];
        std::snprintf(tag, sizeof(tag), "gaussian-sharpe(s=%.12g)", sigma_ou);
        m.tag = tag;
    }
    const double s2 = 2.0 * sigma_ou;
    auto lam = [s2](double y) { return std::sqrt(norm_cdf(y / s2)); };
    m.lambda = lam;
    m.dlambda = [s2, lam](double y) { return norm_pdf(y / s2) / (s2 * 2.0 * lam(y)); };
    m.mu = [lam](double y) {
        const double l = lam(y);
        return 0.1 * l / (0.1 + l);
    };
    m.sigma = [lam](double y) { return 0.1 / (0.1 + lam(y)); };
    m.mu_bound = 0.1 / 1.1;
    m.sigma_lo = 0.1 / 1.1;
    m.sigma_hi = 1.0;
    m.lambda_bound = 1.0;
    // lambda' = phi(y/2s)/(4 s lambda); the product phi/lambda is maximized in
    // the left tail but stays bounded; cheap conservative bound:
    m.dlambda_bound = 1.0 / (4.0 * sigma_ou) * 1.6;
    m.validate();
    return m;
}

MarketModel constant_sharpe_model(double mu0, double sigma0) {
    if (!(sigma0 > 0.0)) throw DomainError("constant_sharpe_model: sigma0 must be positive");
    MarketModel m;
    {
        char tag[64];
        std::snprintf(tag, sizeof(tag), "constant-sharpe(mu=%.12g,sigma=%.12g)", mu0, sigma0);
        m.tag = tag;
    }
    const double l0 = mu0 / sigma0;
    m.mu = [mu0](double) { return mu0; };
    m.sigma = [sigma0](double) { return sigma0; };
    m.lambda = [l0](double) { return l0; };
    m.dlambda = [](double) { return 0.0; };
    m.mu_bound = std::abs(mu0);
    m.sigma_lo = sigma0;
    m.sigma_hi = sigma0;
    m.lambda_bound = std::abs(l0);
    m.dlambda_bound = 0.0;
    m.validate();
    return m;
}

double invariant_average(const std::function<double(double)>& f, double sigma_ou,
                         const QuadratureSpec& spec) {
    if (!(sigma_ou > 0.0)) throw DomainError("invariant_average: sigma_ou must be positive");
    return expect_normal([&](double z) { return f(sigma_ou * z); }, spec);
}

InvariantAverages invariant_averages(const MarketModel& m, double sigma_ou,
                                     const QuadratureSpec& spec) {
    m.validate();
    InvariantAverages avg{};
    avg.lambda_sq_bar = invariant_average(
        [&](double y) {
            const double l = m.lambda(y);
            return l * l;
        },
        sigma_ou, spec);
    avg.mu_bar = invariant_average(m.mu, sigma_ou, spec);
    avg.sigma_sq_bar = invariant_average(
        [&](double y) {
            const double s = m.sigma(y);
            return s * s;
        },
        sigma_ou, spec);
    avg.mu_sq_bar = invariant_average(
        [&](double y) {
            const double u = m.mu(y);
            return u * u;
        },
        sigma_ou, spec);
    return avg;
}

}  // namespace roughfou
