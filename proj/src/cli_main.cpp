#include "otacomm/experiment.hpp"

#include "otacomm/errors.hpp"
#include "otacomm/version.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

namespace otacomm {

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitSimulation = 4;
constexpr int kExitIo = 5;

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Behavioral simulator for OTA-based delta modulators and companders"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string preset;
    std::string config_file;
    std::vector<std::string> overrides;
    std::string out_dir = "otacomm_out";
    std::uint64_t seed = 0;
    bool gnuplot_stub = false;

    std::string chosen;
    for (const char* name : {"dm", "cvsd", "compress", "expand", "roundtrip", "sweep"}) {
        auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
        sub->add_option("--preset", preset, "built-in preset name (see list-presets)");
        sub->add_option("--config", config_file, "key = value config file");
        sub->add_option("--set", overrides, "override a parameter, key=value")
            ->allow_extra_args(false);
        sub->add_option("--out", out_dir, "output directory")->envname("OTACOMM_OUT");
        sub->add_option("--seed", seed, "seed echoed into the run manifest");
        sub->add_flag("--gnuplot-stub", gnuplot_stub, "also emit a ready-to-run plot script");
        sub->callback([&chosen, name] { chosen = name; });
    }
    auto* list = app.add_subcommand("list-presets", "print every built-in preset");
    list->callback([&chosen] { chosen = "list-presets"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (chosen == "list-presets") {
            std::cout << list_presets_text();
            return 0;
        }
        const ExperimentConfig cfg =
            build_config(chosen, preset, config_file, overrides, out_dir, seed, gnuplot_stub);
        run_experiment(cfg);
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "simulation error: " << e.what() << '\n';
        return kExitSimulation;
    }
}

} // namespace otacomm
