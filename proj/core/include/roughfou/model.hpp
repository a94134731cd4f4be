#pragma once

#include <functional>
#include <string>

#include "roughfou/quadrature.hpp"

namespace roughfou {

// Market coefficients as functions of the factor level y: drift mu(y),
// volatility sigma(y), Sharpe ratio lambda(y) = mu/sigma and its derivative.
// `tag` identifies the model instance (including any baked-in parameters) for
// caching keys and output labels.  The declared bounds are metadata used for
// validation and error estimates; construction checks sigma_lo > 0.
struct MarketModel {
    std::string tag;
    std::function<double(double)> mu;
    std::function<double(double)> sigma;
    std::function<double(double)> lambda;
    std::function<double(double)> dlambda;  // lambda'(y)

    double mu_bound = 0.0;      // sup |mu|
    double sigma_lo = 0.0;      // inf sigma > 0
    double sigma_hi = 0.0;      // sup sigma
    double lambda_bound = 0.0;  // sup |lambda|
    double dlambda_bound = 0.0; // sup |lambda'|

    void validate() const;  // throws DomainError
};

// Test model with Gaussian-CDF squared Sharpe ratio:
//   lambda(y)^2 = Phi(y / (2 s)),  mu = 0.1 lambda/(0.1+lambda),
//   sigma = 0.1/(0.1+lambda),
// where s is the stationary standard deviation of the factor.  Composing with
// y = s z makes every invariant average independent of s; in particular the
// average squared Sharpe ratio is exactly 1/2 by symmetry.
MarketModel gaussian_sharpe_model(double sigma_ou);

// Constant Sharpe ratio lambda = mu0/sigma0: the factor has no effect, every
// first-order correction vanishes, and all value estimators must agree.
MarketModel constant_sharpe_model(double mu0, double sigma0);

// E[f(s Z)], Z standard normal: average of f under the stationary factor law
double invariant_average(const std::function<double(double)>& f, double sigma_ou,
                         const QuadratureSpec& spec = {});

struct InvariantAverages {
    double lambda_sq_bar;  // <lambda^2>
    double mu_bar;         // <mu>
    double sigma_sq_bar;   // <sigma^2>
    double mu_sq_bar;      // <mu^2>
};

InvariantAverages invariant_averages(const MarketModel& m, double sigma_ou,
                                     const QuadratureSpec& spec = {});

}  // namespace roughfou
