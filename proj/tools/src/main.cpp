#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roughfou/errors.hpp"
#include "roughfou/experiments.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string scale = "desk";
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string out_dir;
};

void add_common(CLI::App* sub, CliOptions& o) {
    sub->add_option("--config", o.config_path, "config file (key=value or JSON)")
        ->check(CLI::ExistingFile);
    sub->add_option("--scale", o.scale, "preset: desk (50k paths, dt=1e-3) or paper (500k, 1e-4)")
        ->check(CLI::IsMember({"desk", "paper"}));
    sub->add_option("--set", o.sets, "override, repeatable: --set kernel.H=0.2")
        ->take_all();
    sub->add_option("--seed", o.seed, "overrides mc.seed");
    sub->add_option("--threads", o.threads, "worker thread cap (0 = hardware)");
    sub->add_option("--out", o.out_dir, "output directory (overrides out.dir)");
}

roughfou::ExperimentConfig build_config(const CLI::App* sub, const CliOptions& o) {
    using roughfou::ExperimentConfig;
    ExperimentConfig cfg =
        o.scale == "paper" ? ExperimentConfig::paper_scale() : ExperimentConfig::desk_scale();
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path, std::ios::binary);
        if (!in) throw roughfou::ConfigError("cannot open config '" + o.config_path + "'");
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        cfg.apply_text(text);
    }
    for (const std::string& s : o.sets) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) {
            throw roughfou::ConfigError("--set needs key=value, got '" + s + "'");
        }
        cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    if (sub->count("--seed")) cfg.mc.seed = o.seed;
    if (sub->count("--threads")) cfg.threads = o.threads;
    if (sub->count("--out")) cfg.out_dir = o.out_dir;
    return cfg;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// payload to <cmd>.json (and .csv); timestamps only in the side meta file so
// the payload is byte-stable under reruns
void write_outputs(const std::string& out_dir, const std::string& cmd,
                   const roughfou::ExperimentResult& res, double elapsed_s) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path base = fs::path(out_dir) / cmd;
    {
        std::ofstream os(base.string() + ".json", std::ios::binary);
        os << res.json << '\n';
    }
    if (!res.csv.empty()) {
        std::ofstream os(base.string() + ".csv", std::ios::binary);
        os << res.csv;
    }
    {
        std::ofstream os(base.string() + ".meta.json", std::ios::binary);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", elapsed_s);
        os << "{\n  \"written_utc\": \"" << utc_now() << "\",\n  \"elapsed_seconds\": " << buf
           << ",\n  \"version\": \"" << roughfou::version() << "\"\n}\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"portfolio optimization under a fast mean-reverting rough factor"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(roughfou::version()));

    CliOptions opt;
    CLI::App* c_coeff = app.add_subcommand("coefficients", "expansion coefficients and dbar");
    CLI::App* c_table = app.add_subcommand("table2", "value comparison per (eps, history)");
    CLI::App* c_diag = app.add_subcommand("diagnostics", "ergodic scaling and dbar cross-check");
    CLI::App* c_paths = app.add_subcommand("paths", "dump a factor path sample");
    CLI::App* c_wealth = app.add_subcommand("wealth", "wealth-equation oracle per strategy");
    for (CLI::App* sub : {c_coeff, c_table, c_diag, c_paths, c_wealth}) add_common(sub, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();
    try {
        const roughfou::ExperimentConfig cfg = build_config(sub, opt);
        const auto t0 = std::chrono::steady_clock::now();
        roughfou::ExperimentResult res;
        if (cmd == "coefficients") {
            res = roughfou::run_coefficients(cfg);
        } else if (cmd == "table2") {
            res = roughfou::run_table2(cfg);
        } else if (cmd == "diagnostics") {
            res = roughfou::run_diagnostics(cfg);
        } else if (cmd == "paths") {
            const std::string dump =
                (std::filesystem::path(cfg.out_dir) / "paths.bin").string();
            std::filesystem::create_directories(cfg.out_dir);
            res = roughfou::run_paths(cfg, dump);
        } else {
            res = roughfou::run_wealth(cfg);
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_outputs(cfg.out_dir, cmd, res, elapsed);
        std::cout << res.json << '\n';
        return 0;
    } catch (const roughfou::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const roughfou::DomainError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const roughfou::ToleranceError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const roughfou::EstimatorError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
