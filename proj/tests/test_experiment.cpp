#include "otacomm/experiment.hpp"

#include "otacomm/errors.hpp"

#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace otacomm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("otacomm_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"otacomm"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return cli_main(static_cast<int>(argv.size()), argv.data());
}

} // namespace

TEST_CASE("preset listing names every published operating point") {
    const std::string text = list_presets_text();
    for (const char* name : {"paper-fig7", "paper-fig8", "paper-fig5", "paper-fig6",
                             "paper-table1-row1", "paper-table1-row2", "paper-table1-row3",
                             "mu255"}) {
        CHECK(text.find(name) != std::string::npos);
    }
    CHECK(text.find("gm = 10mA/V") != std::string::npos);
    CHECK(text.find("Is = 28.5uA") != std::string::npos);
    CHECK(text.find("fm = 10MHz") != std::string::npos);
}

TEST_CASE("build_config merges preset, file and overrides in order") {
    const fs::path dir = fresh_dir("cfg");
    const fs::path file = dir / "override.cfg";
    {
        std::ofstream out(file);
        out << "# comment line\n";
        out << "points = 128\n";
        out << "v_max = 1.5V   # trailing comment\n";
    }
    const ExperimentConfig cfg = build_config("compress", "paper-table1-row1", file,
                                              {"points=64"}, dir / "out", 7, false);
    CHECK(cfg.params.at("gm") == "10mA/V");    // from the preset
    CHECK(cfg.params.at("v_max") == "1.5V");   // file overrides preset
    CHECK(cfg.params.at("points") == "64");    // --set overrides the file
    CHECK(cfg.seed == 7);
}

TEST_CASE("unknown keys and malformed configs are rejected") {
    CHECK_THROWS_AS(build_config("compress", "", "", {"bogus=1"}, "out", 0, false), ConfigError);
    CHECK_THROWS_AS(build_config("compress", "no-such-preset", "", {}, "out", 0, false),
                    ConfigError);
    CHECK_THROWS_AS(build_config("dm", "paper-fig5", "", {}, "out", 0, false),
                    ConfigError); // preset belongs to compress
    CHECK_THROWS_AS(build_config("compress", "", "", {}, "out", 0, false),
                    ConfigError); // missing required gm, Is
    CHECK_THROWS_AS(build_config("nonsense", "", "", {}, "out", 0, false), ConfigError);

    const fs::path dir = fresh_dir("badcfg");
    const fs::path file = dir / "bad.cfg";
    {
        std::ofstream out(file);
        out << "this line has no equals sign\n";
    }
    CHECK_THROWS_AS(build_config("compress", "", file, {}, "out", 0, false), ConfigError);
}

TEST_CASE("dm experiment writes the full artifact set") {
    const fs::path dir = fresh_dir("dm_run");
    const int rc = run_cli({"dm", "--preset", "paper-fig7", "--out", dir.string()});
    CHECK(rc == 0);
    for (const char* f : {"input.csv", "staircase.csv", "error.csv", "steps.csv", "summary.txt",
                          "manifest.json", "resolved.cfg"}) {
        CHECK(fs::exists(dir / f));
    }
    const std::string summary = slurp(dir / "summary.txt");
    CHECK(summary.find("delta = 0.25") != std::string::npos);
    CHECK(summary.find("mean_step = 0.25") != std::string::npos);

    const std::string csv = slurp(dir / "input.csv");
    CHECK(csv.rfind("t,v\n", 0) == 0);
}

TEST_CASE("gnuplot stub is emitted on request") {
    const fs::path dir = fresh_dir("plot");
    const int rc = run_cli({"compress", "--preset", "paper-fig5", "--out", dir.string(),
                            "--gnuplot-stub"});
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "plot.gp"));
    CHECK(slurp(dir / "plot.gp").find("transfer.csv") != std::string::npos);

    const fs::path dm_dir = fresh_dir("plot_dm");
    REQUIRE(run_cli({"dm", "--preset", "paper-fig7", "--out", dm_dir.string(),
                     "--gnuplot-stub"}) == 0);
    CHECK(slurp(dm_dir / "plot.gp").find("staircase.csv") != std::string::npos);
    CHECK(slurp(dm_dir / "manifest.json").find("plot.gp") != std::string::npos);
}

TEST_CASE("cvsd accepts the oversampling-factor form") {
    const fs::path dir = fresh_dir("cvsd_k");
    const int rc = run_cli({"cvsd", "--set", "fm=10MHz", "--set", "k=6", "--set", "C1=0.5pF",
                            "--set", "gm_min=28uA/V", "--set", "gm_max=81uA/V", "--set",
                            "amp=1.2V", "--set", "periods=30", "--out", dir.string()});
    CHECK(rc == 0);
    const std::string resolved = slurp(dir / "resolved.cfg");
    CHECK(resolved.find("k = 6") != std::string::npos);
    CHECK(resolved.find("ctrl_gain = ") != std::string::npos); // auto-sized gain echoed
    CHECK(resolved.find("lpf_fc = ") != std::string::npos);
    CHECK(fs::exists(dir / "gm_trace.csv"));
    CHECK(fs::exists(dir / "step_trace.csv"));
}

TEST_CASE("exit codes distinguish config, validation and io failures") {
    const fs::path dir = fresh_dir("codes");
    // Unknown parameter: config error.
    CHECK(run_cli({"compress", "--preset", "paper-fig5", "--set", "bogus=1", "--out",
                   (dir / "a").string()}) == 2);
    // Unknown subcommand: config error.
    CHECK(run_cli({"explode"}) == 2);
    // Invalid physical value: validation error.
    CHECK(run_cli({"compress", "--preset", "paper-fig5", "--set", "gm=-1mA/V", "--out",
                   (dir / "b").string()}) == 3);
    CHECK(run_cli({"dm", "--preset", "paper-fig7", "--set", "fs=5MHz", "--set", "k=",
                   "--out", (dir / "c").string()}) == 2); // malformed --set
    // Unwritable output directory: io error.
    CHECK(run_cli({"compress", "--preset", "paper-fig5", "--out", "/proc/otacomm/nope"}) == 5);
    // Success for reference.
    CHECK(run_cli({"compress", "--preset", "paper-fig5", "--out", (dir / "ok").string()}) == 0);
}

TEST_CASE("OTACOMM_OUT provides the default output directory") {
    const fs::path dir = fresh_dir("envout");
    REQUIRE(setenv("OTACOMM_OUT", dir.string().c_str(), 1) == 0);
    const int rc = run_cli({"compress", "--preset", "paper-fig5"});
    unsetenv("OTACOMM_OUT");
    CHECK(rc == 0);
    CHECK(fs::exists(dir / "transfer.csv"));
}

TEST_CASE("summary reports the published effective mu") {
    const fs::path dir = fresh_dir("mu");
    REQUIRE(run_cli({"compress", "--preset", "paper-table1-row1", "--out", dir.string()}) == 0);
    const std::string summary = slurp(dir / "summary.txt");
    CHECK(summary.find("effective_mu = 350.877") != std::string::npos);
    CHECK(summary.find("mu_reference = 350") != std::string::npos);
}

TEST_CASE("reruns are byte-identical and resolved.cfg replays the run") {
    for (const char* preset : {"paper-fig7", "paper-fig8", "paper-fig5", "mu255"}) {
        const fs::path a = fresh_dir(std::string("det_a_") + preset);
        const fs::path b = fresh_dir(std::string("det_b_") + preset);
        const char* kind = std::string(preset) == "paper-fig7"   ? "dm"
                           : std::string(preset) == "paper-fig8" ? "cvsd"
                           : std::string(preset) == "paper-fig5" ? "compress"
                                                                 : "roundtrip";
        REQUIRE(run_cli({kind, "--preset", preset, "--seed", "3", "--out", a.string()}) == 0);
        REQUIRE(run_cli({kind, "--preset", preset, "--seed", "3", "--out", b.string()}) == 0);
        for (const auto& entry : fs::directory_iterator(a)) {
            const auto name = entry.path().filename();
            CAPTURE(name.string());
            CHECK(slurp(entry.path()) == slurp(b / name));
        }

        // Replay from the resolved config: identical data files.
        const fs::path c = fresh_dir(std::string("det_c_") + preset);
        REQUIRE(run_cli({kind, "--config", (a / "resolved.cfg").string(), "--seed", "3", "--out",
                         c.string()}) == 0);
        for (const auto& entry : fs::directory_iterator(a)) {
            const auto name = entry.path().filename();
            if (name.extension() != ".csv") continue;
            CAPTURE(name.string());
            CHECK(slurp(entry.path()) == slurp(c / name));
        }
    }
}

TEST_CASE("sweep fans out points and merges them in order") {
    const fs::path dir = fresh_dir("sweep");
    const int rc = run_cli({"sweep",
                            "--set", "sweep_experiment=compress",
                            "--set", "sweep_param=gm",
                            "--set", "sweep_values=8mA/V,9mA/V,10mA/V",
                            "--set", "Is=39.5uA",
                            "--set", "gm=1mA/V", // base value, overridden per point
                            "--out", dir.string()});
    CHECK(rc == 0);
    REQUIRE(fs::exists(dir / "sweep.csv"));
    const std::string csv = slurp(dir / "sweep.csv");
    CHECK(csv.find("gm,experiment,effective_mu") != std::string::npos);
    std::size_t row2 = csv.find("202.531");
    std::size_t row3 = csv.find("227.848");
    std::size_t row4 = csv.find("253.164");
    CHECK(row2 != std::string::npos);
    CHECK(row3 != std::string::npos);
    CHECK(row4 != std::string::npos);
    CHECK(row2 < row3); // merged in parameter order
    CHECK(row3 < row4);
    for (const char* sub : {"point_000", "point_001", "point_002"}) {
        CHECK(fs::exists(dir / sub / "transfer.csv"));
    }

    CHECK(run_cli({"sweep", "--set", "sweep_experiment=sweep", "--set", "sweep_param=gm",
                   "--set", "sweep_values=1", "--out", (dir / "x").string()}) == 2);
}
