#include "roughfou/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "roughfou/errors.hpp"

namespace roughfou {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0') {
        throw ConfigError("config: key '" + key + "' needs a number, got '" + v + "'");
    }
    return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (!(x >= 0.0) || x != std::floor(x) || x > 1.8e19) {
        throw ConfigError("config: key '" + key + "' needs a nonnegative integer, got '" + v +
                          "'");
    }
    return static_cast<std::uint64_t>(x);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) continue;
        out.push_back(parse_double(key, t));
    }
    if (out.empty()) throw ConfigError("config: key '" + key + "' needs a list of numbers");
    return out;
}

std::string join_list(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v[i];
    }
    return os.str();
}

// flatten a JSON object into dotted keys feeding the common setter
void apply_json(ExperimentConfig& cfg, const json& j, const std::string& prefix) {
    if (!j.is_object()) {
        throw ConfigError("config: expected an object at '" + (prefix.empty() ? "<root>" : prefix) +
                          "'");
    }
    for (const auto& [key, value] : j.items()) {
        const std::string full = prefix.empty() ? key : prefix + "." + key;
        if (value.is_object()) {
            apply_json(cfg, value, full);
        } else if (value.is_array()) {
            std::vector<double> v;
            for (const auto& e : value) {
                if (!e.is_number()) {
                    throw ConfigError("config: key '" + full + "' needs a numeric array");
                }
                v.push_back(e.get<double>());
            }
            cfg.set(full, join_list(v));
        } else if (value.is_string()) {
            cfg.set(full, value.get<std::string>());
        } else if (value.is_boolean()) {
            cfg.set(full, value.get<bool>() ? "1" : "0");
        } else if (value.is_number()) {
            std::ostringstream os;
            os.precision(17);
            os << value.get<double>();
            cfg.set(full, os.str());
        } else {
            throw ConfigError("config: key '" + full + "' has an unsupported value type");
        }
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    kernel.validate();
    grid.validate();
    preference.validate();
    if (eps_grid.empty()) throw ConfigError("config: eps_grid must be nonempty");
    for (double e : eps_grid) {
        if (!(e > 0.0) || e > 1.0) {
            throw ConfigError("config: eps_grid entries must lie in (0, 1]");
        }
    }
    for (double e : diagnostics.eps_grid) {
        if (!(e > 0.0) || e > 1.0) {
            throw ConfigError("config: diagnostics.eps_grid entries must lie in (0, 1]");
        }
    }
    if (model_name != "gaussian-sharpe" && model_name != "constant") {
        throw ConfigError("config: unknown model '" + model_name +
                          "' (expected gaussian-sharpe or constant)");
    }
    if (mc.n_paths == 0) throw ConfigError("config: mc.n_paths must be positive");
    if (mc.n_histories == 0) throw ConfigError("config: mc.n_histories must be positive");
    if (!(x0 > 0.0)) throw ConfigError("config: x0 must be positive");
    if (!(quadrature.abs_tol > 0.0) || !(quadrature.rel_tol > 0.0)) {
        throw ConfigError("config: quadrature tolerances must be positive");
    }
    market().validate();
}

MarketModel ExperimentConfig::market() const {
    if (model_name == "constant") return constant_sharpe_model(model_mu, model_sigma);
    if (model_name == "gaussian-sharpe") {
        return gaussian_sharpe_model(std::sqrt(sigma_ou_sq(kernel)));
    }
    throw ConfigError("config: unknown model '" + model_name + "'");
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    const std::string k = trim(key);
    const std::string v = trim(value);
    if (k == "kernel.H") kernel.H = parse_double(k, v);
    else if (k == "kernel.a") kernel.a = parse_double(k, v);
    else if (k == "eps_grid") eps_grid = parse_list(k, v);
    else if (k == "grid.T") grid.T = parse_double(k, v);
    else if (k == "grid.dt") grid.dt = parse_double(k, v);
    else if (k == "grid.history") grid.history = (v == "sqrt") ? -1.0 : parse_double(k, v);
    else if (k == "preference.gamma") preference.gamma = parse_double(k, v);
    else if (k == "preference.rho") preference.rho = parse_double(k, v);
    else if (k == "model.name") model_name = v;
    else if (k == "model.mu") model_mu = parse_double(k, v);
    else if (k == "model.sigma") model_sigma = parse_double(k, v);
    else if (k == "mc.n_paths") mc.n_paths = parse_u64(k, v);
    else if (k == "mc.n_histories") mc.n_histories = parse_u64(k, v);
    else if (k == "mc.seed") mc.seed = parse_u64(k, v);
    else if (k == "quadrature.abs_tol") quadrature.abs_tol = parse_double(k, v);
    else if (k == "quadrature.rel_tol") quadrature.rel_tol = parse_double(k, v);
    else if (k == "quadrature.max_subdivisions") {
        quadrature.max_subdivisions = static_cast<int>(parse_u64(k, v));
    } else if (k == "diagnostics.eps_grid") diagnostics.eps_grid = parse_list(k, v);
    else if (k == "diagnostics.n_histories_i") diagnostics.n_histories_i = parse_u64(k, v);
    else if (k == "diagnostics.paths_per_history") {
        diagnostics.paths_per_history = parse_u64(k, v);
    } else if (k == "diagnostics.n_histories_phi") diagnostics.n_histories_phi = parse_u64(k, v);
    else if (k == "diagnostics.dbar_mc_eps") diagnostics.dbar_mc_eps = parse_double(k, v);
    else if (k == "diagnostics.n_histories_dbar") diagnostics.n_histories_dbar = parse_u64(k, v);
    else if (k == "diagnostics.t_ref") diagnostics.t_ref = parse_double(k, v);
    else if (k == "diagnostics.mode") {
        if (v == "discrete") diagnostics.mode = ConditionalVariance::DiscreteConsistent;
        else if (v == "continuum") diagnostics.mode = ConditionalVariance::ContinuumKernel;
        else throw ConfigError("config: diagnostics.mode must be discrete or continuum");
    } else if (k == "x0") x0 = parse_double(k, v);
    else if (k == "threads") threads = static_cast<unsigned>(parse_u64(k, v));
    else if (k == "out.dir") out_dir = v;
    else throw ConfigError("config: unknown key '" + k + "'");
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["kernel"]["H"] = kernel.H;
    j["kernel"]["a"] = kernel.a;
    j["eps_grid"] = eps_grid;
    j["grid"]["T"] = grid.T;
    j["grid"]["dt"] = grid.dt;
    j["grid"]["history"] = grid.resolved_history();
    j["preference"]["gamma"] = preference.gamma;
    j["preference"]["rho"] = preference.rho;
    j["model"]["name"] = model_name;
    if (model_name == "constant") {
        j["model"]["mu"] = model_mu;
        j["model"]["sigma"] = model_sigma;
    }
    j["mc"]["n_paths"] = mc.n_paths;
    j["mc"]["n_histories"] = mc.n_histories;
    j["mc"]["seed"] = mc.seed;
    j["quadrature"]["abs_tol"] = quadrature.abs_tol;
    j["quadrature"]["rel_tol"] = quadrature.rel_tol;
    j["quadrature"]["max_subdivisions"] = quadrature.max_subdivisions;
    j["diagnostics"]["eps_grid"] = diagnostics.eps_grid;
    j["diagnostics"]["n_histories_i"] = diagnostics.n_histories_i;
    j["diagnostics"]["paths_per_history"] = diagnostics.paths_per_history;
    j["diagnostics"]["n_histories_phi"] = diagnostics.n_histories_phi;
    j["diagnostics"]["dbar_mc_eps"] = diagnostics.dbar_mc_eps;
    j["diagnostics"]["n_histories_dbar"] = diagnostics.n_histories_dbar;
    j["diagnostics"]["t_ref"] = diagnostics.t_ref;
    j["diagnostics"]["mode"] =
        diagnostics.mode == ConditionalVariance::DiscreteConsistent ? "discrete" : "continuum";
    j["x0"] = x0;
    j["threads"] = threads;
    j["out"]["dir"] = out_dir;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::desk_scale() {
    ExperimentConfig c;
    c.mc.n_paths = 50000;
    c.grid.dt = 1e-3;
    return c;
}

ExperimentConfig ExperimentConfig::paper_scale() {
    ExperimentConfig c;
    c.mc.n_paths = 500000;
    c.grid.dt = 1e-4;
    return c;
}

void ExperimentConfig::apply_text(const std::string& text) {
    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config: JSON parse error: ") + e.what());
        }
        apply_json(*this, j, "");
        return;
    }
    std::istringstream is(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config: line " + std::to_string(lineno) +
                              " is not of the form key = value");
        }
        set(t.substr(0, eq), t.substr(eq + 1));
    }
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
    ExperimentConfig cfg;
    cfg.apply_text(text);
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

}  // namespace roughfou
