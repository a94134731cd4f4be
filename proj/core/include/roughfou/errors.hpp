#pragma once

#include <stdexcept>
#include <string>

namespace roughfou {

// parameter outside its mathematical domain (H, a, eps, gamma, ...)
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// bad or inconsistent run configuration (files, grids, keys)
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// a quadrature could not reach the requested tolerance
struct ToleranceError : std::runtime_error {
    double achieved;
    double requested;
    ToleranceError(const std::string& what, double achieved_, double requested_)
        : std::runtime_error(what + " (achieved " + std::to_string(achieved_) +
                             ", requested " + std::to_string(requested_) + ")"),
          achieved(achieved_),
          requested(requested_) {}
};

// an estimator produced a non-finite or degenerate result
struct EstimatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace roughfou
