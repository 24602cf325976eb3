#include "gridscan/cli.hpp"
#include "gridscan/config.hpp"
#include "gridscan/errors.hpp"
#include "gridscan/io.hpp"
#include "support.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gridscan;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("gridscan_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path configs_dir() {
    const char* c = std::getenv("GRIDSCAN_CONFIGS");
    return c ? fs::path(c) : fs::path("configs");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json small_config(const std::string& grid, const json& methods) {
    return {{"grid", json::parse(slurp(configs_dir() / grid))},
            {"excitation", {{"amplitude", 0.05}, {"seed", 3}}},
            {"duration_s", 0.1},
            {"Ts", 1e-4},
            {"noise", {{"accuracy_class", 0.005}, {"seed", 4}}},
            {"transient_magnitude", 0.5},
            {"transient_seed", 5},
            {"methods", methods},
            {"bands", json::array({{{"f_min", 0.0}, {"f_max", 2000.0}}})},
            {"threads", 1}};
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump(2);
    return p;
}

struct RunResult {
    int code;
    std::string err;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
    const char* bin = std::getenv("GRIDSCAN_BIN");
    REQUIRE(bin != nullptr);
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + bin + "\" " + args + " 2>\"" + err.string() + "\" >/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), slurp(err)};
}

}  // namespace

TEST_CASE("time series csv round trip is exact") {
    const auto dir = scratch_dir("csv");
    DqTimeSeries x{testsupport::random_complex(257, 1), 1e-4};
    x.samples[3] = {1e-300, -123456789.123456789};
    io::write_dq_csv(dir / "x.csv", x);
    const auto y = io::read_dq_csv(dir / "x.csv");
    CHECK(y.samples == x.samples);
    CHECK(std::abs(y.sample_period - 1e-4) < 1e-18);
    CHECK(slurp(dir / "x.csv").rfind("t,d,q\n", 0) == 0);

    RealTimeSeries r{{0.1, -0.2, 1.0 / 3.0}, 0.5, "r"};
    io::write_real_csv(dir / "r.csv", r);
    CHECK(io::read_real_csv(dir / "r.csv").samples == r.samples);
}

TEST_CASE("malformed csv is rejected") {
    const auto dir = scratch_dir("bad_csv");
    std::ofstream(dir / "hdr.csv") << "time,d,q\n0,1,2\n1e-4,1,2\n";
    CHECK_THROWS_AS(io::read_dq_csv(dir / "hdr.csv"), IncompatibleDataError);
    std::ofstream(dir / "gap.csv") << "t,d,q\n0,1,2\n1e-4,1,2\n3e-4,1,2\n";
    CHECK_THROWS_AS(io::read_dq_csv(dir / "gap.csv"), IncompatibleDataError);
    std::ofstream(dir / "num.csv") << "t,d,q\n0,1,2\n1e-4,abc,2\n";
    CHECK_THROWS_AS(io::read_dq_csv(dir / "num.csv"), IncompatibleDataError);
    CHECK_THROWS_AS(io::read_dq_csv(dir / "absent.csv"), MissingInputError);
}

TEST_CASE("frf csv round trip") {
    const auto dir = scratch_dir("frf");
    std::vector<Matrix2c> z(50);
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    for (auto& m : z)
        for (int i = 0; i < 4; ++i) m(i / 2, i % 2) = {nd(gen), nd(gen)};
    auto frf = impedance_from_matrices(z, 100, 1e-3);
    frf.valid[7] = 0;
    io::write_frf_csv(dir / "z.csv", frf);
    const auto back = io::read_frf_csv(dir / "z.csv", 1e-3);
    CHECK(back.n == 100);
    CHECK(back.z_dd == frf.z_dd);
    CHECK(back.z_dq == frf.z_dq);
    CHECK(back.z_qd == frf.z_qd);
    CHECK(back.z_qq == frf.z_qq);
    CHECK(back.valid == frf.valid);
}

TEST_CASE("experiment config parsing") {
    const auto cfg = load_experiment_config(configs_dir() / "experiment_default.json");
    CHECK(cfg.sample_count() == 10000);
    CHECK(cfg.sample_period == 1e-4);
    CHECK_FALSE(cfg.grid.is_symmetric());
    CHECK(cfg.methods.size() == 12);
    CHECK(method_label(cfg.methods[1]) == "lpm_R4_l18");
    CHECK(method_label(cfg.methods[5]) == "arx_2");
    CHECK(method_label(cfg.methods.back()) == "seqpert_hamming");
    CHECK(method_order(cfg.methods.back()) == std::nullopt);

    const auto resolved = to_json(cfg);
    const auto again = parse_experiment_config(json::parse(resolved.dump()), configs_dir());
    CHECK(to_json(again).dump() == resolved.dump());
}

TEST_CASE("config errors name the field") {
    auto j = small_config("grid_symmetric.json", json::array({{{"etfe", json::object()}}}));
    auto expect_error = [](const json& bad, const std::string& needle) {
        try {
            parse_experiment_config(bad, ".");
            FAIL("no exception for " << needle);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    CHECK_NOTHROW(parse_experiment_config(j, "."));
    auto bad = j;
    bad["colour"] = 1;
    expect_error(bad, "colour");
    bad = j;
    bad["noise"]["sigma"] = 1;
    expect_error(bad, "sigma");
    bad = j;
    bad["duration_s"] = 0.10005;
    expect_error(bad, "duration_s");
    bad = j;
    bad["methods"] = json::array();
    expect_error(bad, "methods");
    bad = j;
    bad["methods"] = json::array({{{"lpm", {{"R", 4}, {"l", 5}}}}});
    expect_error(bad, "methods");
    bad = j;
    bad["methods"] = json::array({{{"svd", json::object()}}});
    expect_error(bad, "svd");
    bad = j;
    bad["grid"]["branches"][0]["series_R"] = -1.0;
    expect_error(bad, "grid");
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch_dir("exit_codes");
    CHECK(run_cli("simulate", dir).code == cli::exit_config);
    CHECK(run_cli("frobnicate --config x", dir).code == cli::exit_config);

    auto j = small_config("grid_symmetric.json", json::array({{{"etfe", json::object()}}}));
    j["extra"] = true;
    const auto bad = run_cli("simulate --config \"" + write_config(dir, j).string() + "\" --out \"" +
                                 (dir / "o").string() + "\"",
                             dir);
    CHECK(bad.code == cli::exit_config);
    CHECK(bad.err.find("extra") != std::string::npos);

    CHECK(run_cli("simulate --config \"" + (dir / "nope.json").string() + "\"", dir).code ==
          cli::exit_missing_input);

    j.erase("extra");
    const auto cfg = write_config(dir, j);
    CHECK(run_cli("identify --config \"" + cfg.string() + "\" --out \"" + (dir / "empty").string() + "\"", dir)
              .code == cli::exit_missing_input);

    // a 20-sample record cannot hold the default LPM window
    auto tiny = small_config("grid_symmetric.json", json::array({{{"lpm", {{"R", 4}}}}}));
    tiny["duration_s"] = 0.002;
    CHECK(run_cli("simulate --config \"" + write_config(dir, tiny).string() + "\"", dir).code == cli::exit_config);

    // 202 samples do not split into two even halves
    auto odd = small_config("grid_symmetric.json", json::array({{{"seqpert", {{"window", "hamming"}}}}}));
    odd["duration_s"] = 0.0202;
    const auto odd_cfg = write_config(dir, odd);
    const std::string out = " --out \"" + (dir / "odd").string() + "\"";
    REQUIRE(run_cli("simulate --config \"" + odd_cfg.string() + "\"" + out, dir).code == 0);
    CHECK(run_cli("identify --config \"" + odd_cfg.string() + "\"" + out, dir).code == cli::exit_incompatible);
}

TEST_CASE("evaluate rejects mismatched grids") {
    const auto dir = scratch_dir("grid_mismatch");
    const auto cfg = write_config(dir, small_config("grid_symmetric.json", json::array({{{"etfe", json::object()}}})));
    const std::string args = " --config \"" + cfg.string() + "\" --out \"" + (dir / "d").string() + "\"";
    REQUIRE(run_cli("simulate" + args, dir).code == 0);
    REQUIRE(run_cli("identify" + args, dir).code == 0);
    // estimate on a coarser grid than the truth is not comparable
    std::vector<Matrix2c> z(150, Matrix2c::Identity());
    io::write_frf_csv(dir / "d" / "etfe" / "z_frf.csv", impedance_from_matrices(z, 300, 1e-4));
    CHECK(run_cli("evaluate" + args, dir).code == cli::exit_incompatible);
}

TEST_CASE("simulate is deterministic and complete") {
    const auto dir = scratch_dir("simulate");
    const auto cfg = write_config(dir, small_config("grid_asymmetric.json", json::array({{{"etfe", json::object()}}})));
    const std::string c = " --config \"" + cfg.string() + "\"";
    REQUIRE(run_cli("simulate" + c + " --out \"" + (dir / "a").string() + "\"", dir).code == 0);
    REQUIRE(run_cli("simulate" + c + " --out \"" + (dir / "b").string() + "\"", dir).code == 0);
    for (const char* f : {"i.csv", "v.csv", "i_clean.csv", "v_clean.csv", "truth_frf.csv", "x0.csv", "manifest.json"}) {
        REQUIRE(fs::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    const auto v = io::read_dq_csv(dir / "a" / "v.csv");
    CHECK(v.size() == 1000);
    CHECK(slurp(dir / "a" / "v.csv") != slurp(dir / "a" / "v_clean.csv"));

    const auto m = json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(m.at("N") == 1000);
    CHECK(m.at("grid_symmetric") == false);
    // the manifest alone reproduces the dataset
    const auto from_manifest = parse_experiment_config(m.at("config"), dir);
    const auto data = cli::simulate_dataset(from_manifest);
    CHECK(data.voltage.samples == v.samples);

    REQUIRE(run_cli("simulate" + c + " --no-noise --out \"" + (dir / "clean").string() + "\"", dir).code == 0);
    CHECK(slurp(dir / "clean" / "v.csv") == slurp(dir / "clean" / "v_clean.csv"));
    CHECK(slurp(dir / "clean" / "i.csv") == slurp(dir / "clean" / "i_clean.csv"));
    CHECK(run_cli("simulate" + c + " --noise --no-noise", dir).code == cli::exit_config);
}

TEST_CASE("identify writes per-method outputs") {
    const auto dir = scratch_dir("identify");
    const json methods = json::array({{{"lpm", {{"R", 2}}}}, {{"seqpert", {{"window", "hamming"}}}},
                                      {{"etfe", json::object()}}, {{"arx", {{"order", 2}}}}});
    const auto cfg = write_config(dir, small_config("grid_asymmetric.json", methods));
    const std::string args = " --config \"" + cfg.string() + "\" --out \"" + (dir / "d").string() + "\"";
    REQUIRE(run_cli("simulate" + args, dir).code == 0);
    const auto r = run_cli("identify" + args, dir);
    CHECK(r.code == 0);
    CHECK(r.err.find("warning: etfe") != std::string::npos);

    const auto lpm = slurp(dir / "d" / "lpm_R2_l10" / "gplus_gminus.csv");
    CHECK(std::count(lpm.begin(), lpm.end(), '\n') == 1001);
    CHECK(lpm.find("residual") != std::string::npos);
    CHECK(io::read_frf_csv(dir / "d" / "lpm_R2_l10" / "z_frf.csv", 1e-4).size() == 500);
    // the record is split into two halves of 500 samples
    CHECK(io::read_frf_csv(dir / "d" / "seqpert_hamming" / "z_frf.csv", 1e-4).size() == 250);
    CHECK(io::read_frf_csv(dir / "d" / "arx_2" / "z_frf.csv", 1e-4).size() == 500);

    REQUIRE(run_cli("evaluate" + args, dir).code == 0);
    const auto rep = json::parse(slurp(dir / "d" / "report.json"));
    REQUIRE(rep.at("entries").size() == 4);
    CHECK(rep["entries"][0]["label"] == "lpm_R2_l10");
    CHECK(rep["entries"][0]["fit_pct"]["dd"].get<double>() > 90.0);
}

TEST_CASE("a perfect estimate scores 100") {
    const auto dir = scratch_dir("perfect");
    const auto cfg = write_config(dir, small_config("grid_symmetric.json", json::array({{{"etfe", json::object()}}})));
    const std::string args = " --config \"" + cfg.string() + "\" --out \"" + (dir / "d").string() + "\"";
    REQUIRE(run_cli("simulate" + args, dir).code == 0);
    fs::create_directories(dir / "d" / "etfe");
    fs::copy_file(dir / "d" / "truth_frf.csv", dir / "d" / "etfe" / "z_frf.csv");
    REQUIRE(run_cli("evaluate" + args, dir).code == 0);
    const auto e = json::parse(slurp(dir / "d" / "report.json"))["entries"][0];
    for (const char* c : {"dd", "dq", "qd", "qq"}) CHECK(e["fit_pct"][c].get<double>() == 100.0);
    CHECK(e["rel_hinf"].get<double>() == 0.0);
}

TEST_CASE("compare with a single method") {
    const auto dir = scratch_dir("compare");
    const auto cfg = write_config(dir, small_config("grid_symmetric.json", json::array({{{"lpm", {{"R", 2}}}}})));
    REQUIRE(run_cli("compare --config \"" + cfg.string() + "\" --out \"" + (dir / "d").string() + "\"", dir).code == 0);
    const auto rep = json::parse(slurp(dir / "d" / "compare.json"));
    CHECK(rep["entries"].size() == 1);
    CHECK(rep["N"] == 1000);
    const auto table = slurp(dir / "d" / "compare.txt");
    CHECK(std::count(table.begin(), table.end(), '\n') == 2);
    CHECK(table.find("lpm_R2_l10") != std::string::npos);
}

TEST_CASE("compare keeps failed rows") {
    const auto dir = scratch_dir("compare_fail");
    const json methods = json::array({{{"etfe", json::object()}}, {{"seqpert", {{"window", "hamming"}}}}});
    auto j = small_config("grid_symmetric.json", methods);
    // 202 samples do not split into two even halves
    j["duration_s"] = 0.0202;
    const auto cfg = write_config(dir, j);
    const auto r = run_cli("compare --config \"" + cfg.string() + "\" --out \"" + (dir / "d").string() + "\"", dir);
    CHECK(r.code == cli::exit_incompatible);
    const auto rep = json::parse(slurp(dir / "d" / "compare.json"));
    REQUIRE(rep["entries"].size() == 2);
    CHECK(rep["entries"][0].contains("fit_pct"));
    CHECK(rep["entries"][1].contains("error"));
}
