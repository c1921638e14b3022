#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace otacomm {

enum class ExperimentKind { dm, cvsd, compress, expand, roundtrip, sweep };

ExperimentKind experiment_from_name(const std::string& name);
std::string experiment_name(ExperimentKind kind);

/// Built-in operating points. Parameter values keep their SI-suffixed
/// spelling so list_presets_text() shows them the way a config file would.
struct Preset {
    std::string name;
    ExperimentKind kind;
    std::vector<std::pair<std::string, std::string>> params;
    std::string anchor; // which published figure/table row this reproduces
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);
std::string list_presets_text();

/// A fully resolved experiment: what to run, with which parameters (raw
/// strings, SI suffixes allowed), where to write, and under which seed.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::dm;
    std::string preset;                       // empty when none was used
    std::map<std::string, std::string> params;
    std::filesystem::path output_dir;
    std::uint64_t seed = 0;
    bool gnuplot_stub = false;
};

/// Merges preset, config file and --set overrides (in that order) and
/// rejects unknown keys. config_file may be empty; each override is a
/// "key=value" string.
ExperimentConfig build_config(const std::string& experiment, const std::string& preset_name,
                              const std::filesystem::path& config_file,
                              const std::vector<std::string>& set_overrides,
                              const std::filesystem::path& output_dir, std::uint64_t seed,
                              bool gnuplot_stub);

/// Runs the experiment: validates every parameter, simulates, writes the
/// waveform/transfer CSVs, a summary text report, a machine-readable
/// manifest and a replayable resolved.cfg into output_dir, and echoes the
/// summary to stdout. Throws the typed errors from errors.hpp on failure.
void run_experiment(const ExperimentConfig& cfg);

/// Full command-line entry point (argument parsing, error-to-exit-code
/// mapping). Exposed so tests can drive the CLI in-process.
int cli_main(int argc, const char* const* argv);

} // namespace otacomm
