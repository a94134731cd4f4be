#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <roughfou/kernel.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("roughfou_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

CliRun run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path cap = work_dir() / ("stdout_" + std::to_string(counter++) + ".txt");
    const std::string cmd = std::string(CLI_BINARY_PATH) + " " + args + " > " +
                            cap.string() + " 2>" + cap.string() + ".err";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(cap);
    return r;
}

// fast coefficients invocation: the constant model short-circuits dbar
const std::string kConstSets =
    " --set model.name=constant --set model.mu=0.06 --set model.sigma=0.2";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors") {
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("coefficients --help").code == 0);
    CHECK(run_cli("").code == 2);                      // a subcommand is required
    CHECK(run_cli("frobnicate").code == 2);            // unknown subcommand
    CHECK(run_cli("coefficients --bogus").code == 2);  // unknown option
    CHECK(run_cli("coefficients --config /no/such/file.cfg").code == 2);
}

TEST_CASE("bad configuration exits with code 2") {
    CHECK(run_cli("coefficients --set no.such.key=1").code == 2);
    CHECK(run_cli("coefficients --set kernel.H=0.9").code == 2);
    CHECK(run_cli("coefficients --set mc.n_paths=0").code == 2);
    CHECK(run_cli("coefficients --set eps_grid=2.0").code == 2);
}

TEST_CASE("unreachable tolerance exits with code 3") {
    const CliRun r = run_cli(
        "coefficients --set quadrature.abs_tol=1e-30 --set quadrature.rel_tol=1e-30");
    CHECK(r.code == 3);
}

TEST_CASE("coefficients payload carries the resolved run") {
    const fs::path out = work_dir() / "coef1";
    const CliRun r = run_cli("coefficients" + kConstSets + " --seed 777 --out " + out.string());
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["command"] == "coefficients");
    CHECK(j["config"]["model"]["name"] == "constant");
    CHECK(j["config"]["mc"]["seed"] == 777);
    CHECK(j.contains("version"));
    CHECK(r.out.find("written_utc") == std::string::npos);  // payload stays timestamp-free

    const json& res = j["results"];
    CHECK(res["dbar"] == 0.0);
    CHECK(std::abs(res["lambda_sq_bar"].get<double>() - 0.09) <= 1e-12);
    CHECK(std::abs(res["pi0_fraction_at_y0"].get<double>() - 3.75) <= 1e-12);
    CHECK(std::abs(res["pibar0_fraction"].get<double>() - 3.75) <= 1e-12);
    CHECK(std::abs(res["sigma_ou_sq"].get<double>() -
                   roughfou::sigma_ou_sq({0.1, 1.0})) <= 1e-12);
    CHECK(res["value"].size() == 5);  // one row per default eps

    // files: payload (identical to stdout), meta with the timestamp
    CHECK(slurp(out / "coefficients.json") == r.out);
    const json meta = json::parse(slurp(out / "coefficients.meta.json"));
    CHECK(meta.contains("written_utc"));
    CHECK(meta.contains("elapsed_seconds"));
    CHECK(meta.contains("version"));
}

TEST_CASE("rough-model coefficients match the quadrature anchor") {
    const fs::path out = work_dir() / "coef_rough";
    const CliRun r = run_cli("coefficients --out " + out.string());
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(std::abs(j["results"]["dbar"].get<double>() - 1.3267120727e-05) <= 2e-9);
    CHECK(std::abs(j["results"]["lambda_sq_bar"].get<double>() - 0.5) <= 1e-10);
    CHECK(std::abs(j["results"]["q"].get<double>() - 8.0 / 11.0) <= 1e-14);
}

TEST_CASE("payloads are byte-identical across reruns and thread counts") {
    // same args twice: stdout must match byte for byte (out.dir is echoed
    // in the payload, so the rerun reuses the same directory)
    const fs::path o1 = work_dir() / "det1";
    const fs::path o3 = work_dir() / "det3";
    const CliRun a = run_cli("coefficients" + kConstSets + " --out " + o1.string());
    const CliRun b = run_cli("coefficients" + kConstSets + " --out " + o1.string());
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(slurp(o1 / "coefficients.json") == b.out);
    // the thread count is echoed in the config; results must not move
    const CliRun c = run_cli("coefficients" + kConstSets + " --threads 3 --out " + o3.string());
    REQUIRE(c.code == 0);
    const json r1 = json::parse(b.out);
    const json r3 = json::parse(c.out);
    CHECK(r1["results"].dump() == r3["results"].dump());
    CHECK(r3["config"]["threads"] == 3);
}

TEST_CASE("config files load with overrides applied on top") {
    const fs::path cfg = work_dir() / "run.cfg";
    {
        std::ofstream f(cfg);
        f << "kernel.H = 0.2\nmodel.name = constant\nmc.seed = 5\n";
    }
    const fs::path out = work_dir() / "filecfg";
    const CliRun r = run_cli("coefficients --config " + cfg.string() +
                             " --set kernel.H=0.3 --out " + out.string());
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["config"]["kernel"]["H"] == 0.3);  // --set wins over the file
    CHECK(j["config"]["mc"]["seed"] == 5);
    CHECK(j["config"]["model"]["name"] == "constant");
}

TEST_CASE("paths subcommand dumps a reproducible binary sample") {
    const std::string shape =
        " --set grid.T=0.05 --set grid.dt=0.005 --set grid.history=0.05"
        " --set mc.n_paths=8 --set eps_grid=0.5";
    const fs::path o1 = work_dir() / "paths1";
    const fs::path o2 = work_dir() / "paths2";
    const CliRun r = run_cli("paths" + shape + " --out " + o1.string());
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["results"]["n_paths"] == 8);
    CHECK(j["results"]["n_forward"] == 10);
    CHECK(j["results"]["n_history"] == 10);
    const double wsum = j["results"]["weight_sum"].get<double>();
    const double expect =
        std::sqrt(0.5) * roughfou::kernel_primitive(0.1 / 0.5, {0.1, 1.0});
    CHECK(std::abs(wsum - expect) <= 1e-12);
    CHECK(fs::exists(o1 / "paths.bin"));
    CHECK(fs::file_size(o1 / "paths.bin") > 0);

    REQUIRE(run_cli("paths" + shape + " --out " + o2.string()).code == 0);
    CHECK(slurp(o1 / "paths.bin") == slurp(o2 / "paths.bin"));
}

TEST_CASE("wealth subcommand cross-checks the estimators per eps") {
    const fs::path out = work_dir() / "wealth1";
    const CliRun r = run_cli(
        "wealth --set grid.T=0.1 --set grid.dt=0.002 --set grid.history=0.1"
        " --set mc.n_paths=64 --set eps_grid=0.5,0.1 --out " + out.string());
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    const json& rows = j["results"]["rows"];
    REQUIRE(rows.size() == 2);
    for (const json& row : rows) {
        CHECK(row.contains("w_pi0"));
        CHECK(row.contains("v_pi0"));
        const double diff = row["diff_pi0_wealth"].get<double>();
        CHECK(std::abs(diff) <= 1e-9);  // same path functional both ways
    }
    CHECK(fs::exists(out / "wealth.csv"));
    const std::string csv = slurp(out / "wealth.csv");
    CHECK(csv.rfind("eps,omega,quantity,value,std_err", 0) == 0);
}

TEST_CASE("table2 subcommand emits one row per history and eps") {
    const fs::path out = work_dir() / "table1";
    const CliRun r = run_cli(
        "table2 --set grid.T=0.1 --set grid.dt=0.002 --set grid.history=0.1"
        " --set mc.n_paths=64 --set mc.n_histories=2 --set eps_grid=0.5,0.1 --out " +
        out.string());
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    const json& rows = j["results"]["rows"];
    REQUIRE(rows.size() == 4);
    for (const json& row : rows) {
        CHECK(row.contains("eps"));
        CHECK(row.contains("omega"));
        CHECK(row.contains("v_eps"));
        CHECK(row.contains("rel_loss_pi0"));
    }
    CHECK(fs::exists(out / "table2.csv"));
}

TEST_CASE("diagnostics subcommand reports the scaling study") {
    const fs::path out = work_dir() / "diag1";
    const CliRun r = run_cli(
        "diagnostics --set grid.T=0.1 --set grid.dt=0.002 --set grid.history=0.1"
        " --set diagnostics.eps_grid=0.5,0.2 --set diagnostics.n_histories_i=4"
        " --set diagnostics.paths_per_history=8 --set diagnostics.n_histories_phi=8"
        " --set diagnostics.n_histories_dbar=8 --set diagnostics.dbar_mc_eps=0.2"
        " --out " + out.string());
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    const json& res = j["results"];
    REQUIRE(res["rows"].size() == 2);
    CHECK(res.contains("slope_i"));
    CHECK(res.contains("dbar_mc"));
    CHECK(std::abs(res["dbar_quadrature"].get<double>() - 1.3267120727e-05) <= 2e-9);
    CHECK(fs::exists(out / "diagnostics.csv"));
}

}  // TEST_SUITE
