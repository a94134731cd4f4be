#include "roughfou/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "roughfou/errors.hpp"
#include "roughfou/montecarlo.hpp"
#include "roughfou/parallel.hpp"

namespace roughfou {

namespace {

using nlohmann::json;

json payload_header(const char* command, const ExperimentConfig& cfg) {
    json j;
    j["command"] = command;
    j["config"] = json::parse(cfg.to_json());
    j["version"] = version();
    return j;
}

json estimate_json(const ValueEstimate& e) {
    json j;
    j["estimator"] = e.estimator;
    j["mean"] = e.mean;
    j["std_err"] = e.std_err;
    j["jensen_bias"] = e.jensen_bias;
    j["raw_mean"] = e.raw_mean;
    j["raw_std_err"] = e.raw_std_err;
    j["n_paths"] = e.n_paths;
    return j;
}

std::string fmt(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", x);
    return b;
}

void csv_obs(std::string& csv, double eps, std::uint64_t omega, const char* quantity,
             double value, double std_err) {
    csv += fmt(eps);
    csv += ',';
    csv += std::to_string(omega);
    csv += ',';
    csv += quantity;
    csv += ',';
    csv += fmt(value);
    csv += ',';
    csv += fmt(std_err);
    csv += '\n';
}

// certainty-equivalent loss of following pi instead of the optimum; the
// (1-gamma) prefactors cancel, so one formula covers both gamma regimes
double ce_loss(double v_opt, double v_pi, double gamma) {
    const double r = v_pi / v_opt;
    if (!(r > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return 1.0 - std::pow(r, 1.0 / (1.0 - gamma));
}

}  // namespace

ExperimentResult run_coefficients(const ExperimentConfig& cfg) {
    cfg.validate();
    set_max_threads(cfg.threads);
    const MarketModel m = cfg.market();
    const ExpansionCoefficients c =
        expansion_coefficients(m, cfg.kernel, cfg.preference, cfg.quadrature);

    json j = payload_header("coefficients", cfg);
    json r;
    r["lambda_sq_bar"] = c.lambda_sq_bar;
    r["mu_bar"] = c.mu_bar;
    r["sigma_sq_bar"] = c.sigma_sq_bar;
    r["mu_sq_bar"] = c.mu_sq_bar;
    r["q"] = c.q;
    r["dbar"] = c.dbar;
    r["dbar_err"] = c.dbar_err;
    r["dbar_prime"] = c.dbar_prime;
    r["sigma_ou_sq"] = sigma_ou_sq(cfg.kernel);
    r["kernel_total_mass"] = kernel_total_mass(cfg.kernel);
    r["pi0_fraction_at_y0"] = pi0_fraction(0.0, m, cfg.preference);
    r["pibar0_fraction"] = c.mu_bar / (cfg.preference.gamma * c.sigma_sq_bar);
    const double T = cfg.grid.effective_T();
    json vals = json::array();
    for (double eps : cfg.eps_grid) {
        json v;
        v["eps"] = eps;
        v["v0"] = v0(0.0, cfg.x0, T, cfg.preference, c.lambda_sq_bar);
        v["v1"] = v1(0.0, cfg.x0, T, cfg.preference, c.lambda_sq_bar);
        v["q_eps"] = q_eps_approx(0.0, cfg.x0, T, cfg.preference, c.lambda_sq_bar, c.dbar, eps);
        vals.push_back(v);
    }
    r["value"] = vals;
    j["results"] = r;

    ExperimentResult out;
    out.json = j.dump(2);
    return out;
}

ExperimentResult run_table2(const ExperimentConfig& cfg) {
    cfg.validate();
    set_max_threads(cfg.threads);
    const MarketModel m = cfg.market();
    const ExpansionCoefficients c =
        expansion_coefficients(m, cfg.kernel, cfg.preference, cfg.quadrature);
    const double T = cfg.grid.effective_T();

    json j = payload_header("table2", cfg);
    json rows = json::array();
    std::string csv = "eps,omega,quantity,value,std_err\n";
    for (std::uint64_t h = 0; h < cfg.mc.n_histories; ++h) {
        for (double eps : cfg.eps_grid) {
            json row;
            row["eps"] = eps;
            row["omega"] = h;
            row["q_eps"] =
                q_eps_approx(0.0, cfg.x0, T, cfg.preference, c.lambda_sq_bar, c.dbar, eps);
            try {
                const FouPathSet set(FouParams{cfg.kernel, eps}, cfg.grid, cfg.mc.n_paths,
                                     cfg.mc.seed, h, cfg.quadrature);
                const ValueComparison vc = estimate_values(set, m, c, cfg.preference, cfg.x0);
                row["v_eps"] = estimate_json(vc.v_eps);
                row["v_pi0"] = estimate_json(vc.v_pi0);
                row["v_pibar0"] = estimate_json(vc.v_pibar0);
                row["w_pi0"] = estimate_json(vc.w_pi0);
                row["w_pibar0"] = estimate_json(vc.w_pibar0);
                row["diff_eps_pi0"] = vc.v_eps.mean - vc.v_pi0.mean;
                row["diff_eps_pi0_se"] = vc.se_diff_eps_pi0;
                row["diff_eps_pibar0"] = vc.v_eps.mean - vc.v_pibar0.mean;
                row["diff_eps_pibar0_se"] = vc.se_diff_eps_pibar0;
                row["diff_pi0_pibar0_se"] = vc.se_diff_pi0_pibar0;
                row["diff_pi0_wealth"] = vc.v_pi0.mean - vc.w_pi0.mean;
                row["diff_pi0_wealth_se"] = vc.se_diff_pi0_wealth;
                row["diff_pibar0_wealth"] = vc.v_pibar0.mean - vc.w_pibar0.mean;
                row["diff_pibar0_wealth_se"] = vc.se_diff_pibar0_wealth;
                row["rel_loss_pi0"] = ce_loss(vc.v_eps.mean, vc.v_pi0.mean, cfg.preference.gamma);
                row["rel_loss_pibar0"] =
                    ce_loss(vc.v_eps.mean, vc.v_pibar0.mean, cfg.preference.gamma);
                csv_obs(csv, eps, h, "v_eps", vc.v_eps.mean, vc.v_eps.std_err);
                csv_obs(csv, eps, h, "v_pi0", vc.v_pi0.mean, vc.v_pi0.std_err);
                csv_obs(csv, eps, h, "v_pibar0", vc.v_pibar0.mean, vc.v_pibar0.std_err);
                csv_obs(csv, eps, h, "diff_eps_pi0", vc.v_eps.mean - vc.v_pi0.mean,
                        vc.se_diff_eps_pi0);
                csv_obs(csv, eps, h, "diff_eps_pibar0", vc.v_eps.mean - vc.v_pibar0.mean,
                        vc.se_diff_eps_pibar0);
            } catch (const EstimatorError& e) {
                row["error"] = e.what();
            }
            rows.push_back(row);
        }
    }
    j["results"]["rows"] = rows;

    ExperimentResult out;
    out.json = j.dump(2);
    out.csv = csv;
    return out;
}

ExperimentResult run_diagnostics(const ExperimentConfig& cfg) {
    cfg.validate();
    set_max_threads(cfg.threads);
    const MarketModel m = cfg.market();
    const ErgodicReport rep =
        ergodic_report(cfg.kernel, cfg.grid, m, cfg.diagnostics, cfg.mc.seed, cfg.quadrature);

    json j = payload_header("diagnostics", cfg);
    json r;
    json rows = json::array();
    std::string csv = "eps,i_sq_mean,i_sq_se,phi_l2,phi_l2_se\n";
    for (std::size_t i = 0; i < rep.eps_grid.size(); ++i) {
        json row;
        row["eps"] = rep.eps_grid[i];
        row["i_sq_mean"] = rep.i_sq_mean[i];
        row["i_sq_se"] = rep.i_sq_se[i];
        row["phi_l2"] = rep.phi_l2[i];
        row["phi_l2_se"] = rep.phi_l2_se[i];
        rows.push_back(row);
        csv += fmt(rep.eps_grid[i]);
        csv += ',';
        csv += fmt(rep.i_sq_mean[i]);
        csv += ',';
        csv += fmt(rep.i_sq_se[i]);
        csv += ',';
        csv += fmt(rep.phi_l2[i]);
        csv += ',';
        csv += fmt(rep.phi_l2_se[i]);
        csv += '\n';
    }
    r["rows"] = rows;
    r["slope_i"] = rep.slope_i;
    r["slope_phi"] = rep.slope_phi;
    r["t_ref"] = rep.t_ref;
    r["dbar_mc_eps"] = rep.dbar_mc_eps;
    r["dbar_mc"] = rep.dbar_mc;
    r["dbar_mc_se"] = rep.dbar_mc_se;
    r["dbar_lattice_exact"] = rep.dbar_lattice_exact;
    r["dbar_truncated_continuum"] = rep.dbar_truncated_continuum;
    r["dbar_quadrature"] = rep.dbar_quadrature;
    j["results"] = r;

    ExperimentResult out;
    out.json = j.dump(2);
    out.csv = csv;
    return out;
}

ExperimentResult run_paths(const ExperimentConfig& cfg, const std::string& dump_file) {
    cfg.validate();
    set_max_threads(cfg.threads);
    const double eps = cfg.eps_grid.front();
    const FouParams fp{cfg.kernel, eps};
    const FouPathSet set(fp, cfg.grid, cfg.mc.n_paths, cfg.mc.seed, 0, cfg.quadrature);

    const std::vector<double>& khat = set.weights();
    double ksum = 0.0;
    for (double k : khat) ksum += k;

    // sample moments of the terminal factor over a capped number of paths
    const std::uint64_t n_sample = std::min<std::uint64_t>(cfg.mc.n_paths, 2048);
    FouPath p;
    double s1 = 0.0, s2 = 0.0;
    for (std::uint64_t i = 0; i < n_sample; ++i) {
        set.path(i, p);
        const double y = p.y.back();
        s1 += y;
        s2 += y * y;
    }
    const double mean_yt = s1 / static_cast<double>(n_sample);
    const double var_yt =
        (s2 - static_cast<double>(n_sample) * mean_yt * mean_yt) /
        static_cast<double>(n_sample - 1);

    json j = payload_header("paths", cfg);
    json r;
    r["eps"] = eps;
    r["n_paths"] = cfg.mc.n_paths;
    r["n_forward"] = cfg.grid.n_forward();
    r["n_history"] = cfg.grid.n_history();
    r["weight_sum"] = ksum;
    r["discrete_variance"] = discrete_variance(khat, cfg.grid.dt);
    r["sigma_ou_sq"] = sigma_ou_sq(cfg.kernel);
    r["history_truncation_variance"] = history_truncation_variance(fp, cfg.grid, cfg.quadrature);
    r["sample_mean_y_T"] = mean_yt;
    r["sample_var_y_T"] = var_yt;
    r["n_sample"] = n_sample;
    if (!dump_file.empty()) {
        std::ofstream os(dump_file, std::ios::binary);
        if (!os) throw ConfigError("paths: cannot open '" + dump_file + "' for writing");
        dump_paths(set, os, cfg.mc.n_paths);
        r["dump_file"] = dump_file;
    }
    j["results"] = r;

    ExperimentResult out;
    out.json = j.dump(2);
    return out;
}

ExperimentResult run_wealth(const ExperimentConfig& cfg) {
    cfg.validate();
    set_max_threads(cfg.threads);
    const MarketModel m = cfg.market();
    const ExpansionCoefficients c =
        expansion_coefficients(m, cfg.kernel, cfg.preference, cfg.quadrature);

    json j = payload_header("wealth", cfg);
    json rows = json::array();
    std::string csv = "eps,omega,quantity,value,std_err\n";
    for (double eps : cfg.eps_grid) {
        json row;
        row["eps"] = eps;
        row["omega"] = 0;
        try {
            const FouPathSet set(FouParams{cfg.kernel, eps}, cfg.grid, cfg.mc.n_paths,
                                 cfg.mc.seed, 0, cfg.quadrature);
            const ValueComparison vc = estimate_values(set, m, c, cfg.preference, cfg.x0);
            row["w_pi0"] = estimate_json(vc.w_pi0);
            row["w_pibar0"] = estimate_json(vc.w_pibar0);
            row["v_pi0"] = estimate_json(vc.v_pi0);
            row["v_pibar0"] = estimate_json(vc.v_pibar0);
            row["diff_pi0_wealth"] = vc.v_pi0.mean - vc.w_pi0.mean;
            row["diff_pi0_wealth_se"] = vc.se_diff_pi0_wealth;
            row["diff_pibar0_wealth"] = vc.v_pibar0.mean - vc.w_pibar0.mean;
            row["diff_pibar0_wealth_se"] = vc.se_diff_pibar0_wealth;
            csv_obs(csv, eps, 0, "w_pi0", vc.w_pi0.mean, vc.w_pi0.std_err);
            csv_obs(csv, eps, 0, "w_pibar0", vc.w_pibar0.mean, vc.w_pibar0.std_err);
            csv_obs(csv, eps, 0, "diff_pi0_wealth", vc.v_pi0.mean - vc.w_pi0.mean,
                    vc.se_diff_pi0_wealth);
            csv_obs(csv, eps, 0, "diff_pibar0_wealth", vc.v_pibar0.mean - vc.w_pibar0.mean,
                    vc.se_diff_pibar0_wealth);
        } catch (const EstimatorError& e) {
            row["error"] = e.what();
        }
        rows.push_back(row);
    }
    j["results"]["rows"] = rows;

    ExperimentResult out;
    out.json = j.dump(2);
    out.csv = csv;
    return out;
}

}  // namespace roughfou
