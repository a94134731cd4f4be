#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roughfou/asymptotics.hpp"
#include "roughfou/diagnostics.hpp"
#include "roughfou/fou.hpp"
#include "roughfou/model.hpp"

namespace roughfou {

struct McConfig {
    std::uint64_t n_paths = 50000;
    std::uint64_t n_histories = 3;
    std::uint64_t seed = 20240101;
};

// One experiment, fully specified.  Files use either a flat key=value schema
// with dotted sections (diff-friendly) or the equivalent nested JSON; both
// feed the same dotted-key setter that --set overrides use.  to_json() emits
// every resolved value with sorted keys, so identical configs serialize
// byte-identically.
//
//   kernel.H = 0.1            kernel.a = 1.0
//   eps_grid = 1, 0.5, 0.1, 0.05, 0.01
//   grid.T = 1.0              grid.dt = 0.001
//   grid.history = sqrt       (or a length in time units)
//   preference.gamma = 0.4    preference.rho = -0.5
//   model.name = gaussian-sharpe   (or constant)
//   model.mu = 0.05           model.sigma = 0.2       (constant model only)
//   mc.n_paths = 50000        mc.n_histories = 3      mc.seed = 20240101
//   quadrature.abs_tol = 1e-10     quadrature.rel_tol = 1e-8
//   diagnostics.eps_grid = 0.2, 0.1, 0.05, 0.02
//   diagnostics.n_histories_i = 64      diagnostics.paths_per_history = 512
//   diagnostics.n_histories_phi = 400   diagnostics.n_histories_dbar = 2000
//   diagnostics.dbar_mc_eps = 0.01      diagnostics.t_ref = -1
//   diagnostics.mode = discrete         (or continuum)
//   x0 = 1.0    threads = 0    out.dir = .
struct ExperimentConfig {
    KernelParams kernel{};
    std::vector<double> eps_grid{1.0, 0.5, 0.1, 0.05, 0.01};
    GridSpec grid{};
    Preferences preference{};
    std::string model_name = "gaussian-sharpe";
    double model_mu = 0.05;     // constant model drift
    double model_sigma = 0.2;   // constant model volatility
    McConfig mc{};
    DiagnosticsConfig diagnostics{};
    QuadratureSpec quadrature{};
    double x0 = 1.0;
    unsigned threads = 0;  // 0 keeps the hardware default
    std::string out_dir = ".";

    void validate() const;

    // resolves model.name against the kernel's stationary deviation
    MarketModel market() const;

    // dotted-key override ("kernel.H", "0.2"); throws ConfigError on unknown
    // keys or unparsable values
    void set(const std::string& key, const std::string& value);

    // applies key=value text or a JSON object on top of the current values
    void apply_text(const std::string& text);

    // resolved config as a deterministic JSON object string
    std::string to_json() const;

    // presets differing only in sampling volume and step size
    static ExperimentConfig desk_scale();
    static ExperimentConfig paper_scale();

    // key=value text or a JSON object (detected by a leading '{')
    static ExperimentConfig from_text(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
};

}  // namespace roughfou
