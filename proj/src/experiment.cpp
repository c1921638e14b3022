#include "otacomm/experiment.hpp"

#include "otacomm/blocks.hpp"
#include "otacomm/compander.hpp"
#include "otacomm/csv.hpp"
#include "otacomm/cvsd.hpp"
#include "otacomm/delta_mod.hpp"
#include "otacomm/errors.hpp"
#include "otacomm/metrics.hpp"
#include "otacomm/units.hpp"
#include "otacomm/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

namespace otacomm {

namespace {

using nlohmann::json;
using KeyValue = std::pair<std::string, std::string>;
using Summary = std::vector<KeyValue>;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// ---------------------------------------------------------------------------
// Parameter catalog
// ---------------------------------------------------------------------------

struct KindKeys {
    std::set<std::string> required;
    std::set<std::string> optional;
};

const KindKeys& keys_for(ExperimentKind kind) {
    static const KindKeys dm{{"fm", "gm3", "C1"},
                             {"k", "fs", "V", "spp", "amp", "phase", "periods",
                              "enforce_gm_range"}};
    static const KindKeys cvsd{{"fm", "gm_min", "gm_max", "C1"},
                               {"k", "fs", "gm3", "V", "spp", "amp", "phase", "periods",
                                "ctrl_gain", "lpf_fc", "env_depth", "env_periods"}};
    static const KindKeys compress{{"gm", "Is"}, {"n", "T", "v_max", "points", "mu_reference"}};
    static const KindKeys expand{{"gm1", "gm2", "gm3", "Is"}, {"n", "T", "v_max", "points"}};
    static const KindKeys roundtrip{{"gm", "Is"}, {"n", "T", "v_max", "points"}};
    static const KindKeys sweep{{"sweep_experiment", "sweep_param", "sweep_values"}, {}};
    switch (kind) {
        case ExperimentKind::dm: return dm;
        case ExperimentKind::cvsd: return cvsd;
        case ExperimentKind::compress: return compress;
        case ExperimentKind::expand: return expand;
        case ExperimentKind::roundtrip: return roundtrip;
        case ExperimentKind::sweep: return sweep;
    }
    throw ConfigError("unreachable experiment kind");
}

bool key_allowed(ExperimentKind kind, const std::string& key) {
    const auto& kk = keys_for(kind);
    return kk.required.count(key) != 0 || kk.optional.count(key) != 0;
}

// Typed access over the raw string parameter map.
class Params {
public:
    explicit Params(const std::map<std::string, std::string>& raw) : raw_(raw) {}

    bool has(const std::string& key) const { return raw_.count(key) != 0; }

    double num(const std::string& key) const {
        const auto it = raw_.find(key);
        if (it == raw_.end()) throw ConfigError("missing required parameter '" + key + "'");
        return parse_si_value(it->second);
    }

    double num_or(const std::string& key, double fallback) const {
        return has(key) ? num(key) : fallback;
    }

    int integer(const std::string& key, int fallback) const {
        if (!has(key)) return fallback;
        const double x = num(key);
        const double r = std::round(x);
        if (std::fabs(x - r) > 1e-9) {
            throw ConfigError("parameter '" + key + "' must be an integer");
        }
        return static_cast<int>(r);
    }

    bool flag(const std::string& key, bool fallback) const {
        const auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        const std::string v = trim(it->second);
        if (v == "1" || v == "true") return true;
        if (v == "0" || v == "false") return false;
        throw ConfigError("parameter '" + key + "' must be a boolean (0/1/true/false)");
    }

    std::string str(const std::string& key) const {
        const auto it = raw_.find(key);
        if (it == raw_.end()) throw ConfigError("missing required parameter '" + key + "'");
        return trim(it->second);
    }

private:
    const std::map<std::string, std::string>& raw_;
};

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

struct RunResult {
    Summary summary;           // flat key: value report
    Summary resolved;          // every parameter the simulation used
    json derived;              // derived quantities for the manifest
    std::vector<std::string> outputs;
    std::string plot_script;   // gnuplot stub body, may be empty
};

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << body;
    out.flush();
    if (!out) throw IoError("write to " + path.string() + " failed");
}

std::string summary_text(const Summary& summary) {
    std::ostringstream out;
    for (const auto& [k, v] : summary) out << k << " = " << v << '\n';
    return out.str();
}

template <typename Fn>
Waveform map_samples(const Waveform& in, Fn&& fn) {
    std::vector<double> out(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = fn(in[i]);
    return Waveform(in.dt(), in.t0(), std::move(out));
}

// ---------------------------------------------------------------------------
// Individual experiments
// ---------------------------------------------------------------------------

DmConfig dm_config_from(const Params& p, double* amp, double* phase, double* periods) {
    const double fm = p.num("fm");
    const double V = p.num_or("V", 1.0);
    const double gm3 = p.num("gm3");
    const double C1 = p.num("C1");
    const int spp = p.integer("spp", 32);
    const bool enforce = p.flag("enforce_gm_range", false);
    if (p.has("k") && p.has("fs")) {
        throw ConfigError("give either 'k' or 'fs', not both");
    }
    *amp = p.num_or("amp", 1.0);
    *phase = p.num_or("phase", 0.0);
    *periods = p.num_or("periods", 40.0);
    if (p.has("fs")) {
        return DmConfig::with_sampling_rate(fm, p.num("fs"), V, gm3, C1, spp, enforce);
    }
    if (!p.has("k")) throw ConfigError("missing required parameter 'k' (or 'fs')");
    return DmConfig::from_oversampling(fm, p.integer("k", 0), V, gm3, C1, spp, enforce);
}

void resolve_dm_common(Summary& resolved, const DmConfig& cfg, double amp, double phase,
                       double periods) {
    resolved.emplace_back("fm", fmt17(cfg.fm));
    if (cfg.k) {
        resolved.emplace_back("k", std::to_string(*cfg.k));
    } else {
        resolved.emplace_back("fs", fmt17(cfg.fs));
    }
    resolved.emplace_back("V", fmt17(cfg.V));
    resolved.emplace_back("C1", fmt17(cfg.C1));
    resolved.emplace_back("spp", std::to_string(cfg.samples_per_symbol()));
    resolved.emplace_back("amp", fmt17(amp));
    resolved.emplace_back("phase", fmt17(phase));
    resolved.emplace_back("periods", fmt17(periods));
}

RunResult run_dm(const Params& p, const std::filesystem::path& dir) {
    double amp = 0.0, phase = 0.0, periods = 0.0;
    const DmConfig cfg = dm_config_from(p, &amp, &phase, &periods);
    const double delta = dm_step_size(cfg);

    const Waveform input = sine(amp, cfg.fm, phase, cfg.dt, periods / cfg.fm);
    const DmOutput out = dm_encode_circuit(cfg, input);
    const StepStats stats = measure_steps(out.staircase, cfg.fs);
    const bool overload = detect_slope_overload(input, out.staircase, delta, cfg.fs);
    const double sqnr = sqnr_db(input, out.staircase, cfg.fs);

    write_waveform_csv(dir / "input.csv", input);
    write_waveform_csv(dir / "staircase.csv", out.staircase);
    write_waveform_csv(dir / "error.csv", out.error);
    write_step_stats_csv(dir / "steps.csv", stats);

    RunResult r;
    r.summary = {
        {"experiment", "dm"},
        {"delta", format_double(delta)},
        {"mean_step", format_double(stats.mean_step)},
        {"min_step", format_double(stats.min_step)},
        {"max_step", format_double(stats.max_step)},
        {"step_count", std::to_string(stats.count)},
        {"slope_overload", overload ? "1" : "0"},
        {"sqnr_db", format_double(sqnr)},
        {"bit_count", std::to_string(out.bits.size())},
    };
    resolve_dm_common(r.resolved, cfg, amp, phase, periods);
    r.resolved.emplace_back("gm3", fmt17(cfg.gm3));
    r.resolved.emplace_back("enforce_gm_range", cfg.enforce_gm_range ? "1" : "0");
    r.derived = {{"delta", delta}, {"Ts", cfg.Ts()}, {"dt", cfg.dt}};
    if (cfg.k) r.derived["k"] = *cfg.k;
    r.outputs = {"input.csv", "staircase.csv", "error.csv", "steps.csv"};
    r.plot_script =
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 't (s)'\nset ylabel 'V'\n"
        "plot 'input.csv' using 1:2 with lines, 'staircase.csv' using 1:2 with steps\n";
    return r;
}

RunResult run_cvsd(const Params& p, const std::filesystem::path& dir) {
    double amp = 0.0, phase = 0.0, periods = 0.0;
    const double gm_min = p.num("gm_min");
    const double gm_max = p.num("gm_max");

    // Build the base config; gm3 starts at gm_min unless told otherwise.
    const double fm = p.num("fm");
    const double V = p.num_or("V", 1.0);
    const double gm3 = p.num_or("gm3", gm_min);
    const double C1 = p.num("C1");
    const int spp = p.integer("spp", 32);
    if (p.has("k") && p.has("fs")) throw ConfigError("give either 'k' or 'fs', not both");
    amp = p.num_or("amp", 1.0);
    phase = p.num_or("phase", 0.0);
    periods = p.num_or("periods", 60.0);
    if (!p.has("fs") && !p.has("k")) throw ConfigError("missing required parameter 'k' (or 'fs')");
    DmConfig base = p.has("fs")
                        ? DmConfig::with_sampling_rate(fm, p.num("fs"), V, gm3, C1, spp)
                        : DmConfig::from_oversampling(fm, p.integer("k", 0), V, gm3, C1, spp);

    std::optional<double> ctrl_gain;
    if (p.has("ctrl_gain")) ctrl_gain = p.num("ctrl_gain");
    std::optional<double> lpf_fc;
    if (p.has("lpf_fc")) lpf_fc = p.num("lpf_fc");
    const CvsdConfig cfg = CvsdConfig::make(base, gm_min, gm_max, ctrl_gain, lpf_fc);

    const double env_depth = p.num_or("env_depth", 0.0);
    const double env_periods = p.num_or("env_periods", 30.0);
    const Waveform input =
        am_sine(amp, fm, phase, env_depth, fm / env_periods, base.dt, periods / fm);
    const CvsdOutput out = cvsd_encode(cfg, input);
    const StepStats stats = measure_steps(out.staircase, base.fs);
    const double sqnr = sqnr_db(input, out.staircase, base.fs);

    const double step_per_gm = base.V * base.Ts() / (2.0 * base.C1);

    write_waveform_csv(dir / "input.csv", input);
    write_waveform_csv(dir / "staircase.csv", out.staircase);
    write_waveform_csv(dir / "gm_trace.csv", out.gm_trace);
    write_waveform_csv(dir / "step_trace.csv", out.step_trace);
    write_step_stats_csv(dir / "steps.csv", stats);

    RunResult r;
    r.summary = {
        {"experiment", "cvsd"},
        {"delta_min", format_double(gm_min * step_per_gm)},
        {"delta_max", format_double(gm_max * step_per_gm)},
        {"mean_step", format_double(stats.mean_step)},
        {"min_step", format_double(stats.min_step)},
        {"max_step", format_double(stats.max_step)},
        {"step_ratio", format_double(stats.max_step / stats.min_step)},
        {"step_count", std::to_string(stats.count)},
        {"sqnr_db", format_double(sqnr)},
        {"bit_count", std::to_string(out.bits.size())},
    };
    resolve_dm_common(r.resolved, base, amp, phase, periods);
    r.resolved.emplace_back("gm3", fmt17(base.gm3));
    r.resolved.emplace_back("gm_min", fmt17(gm_min));
    r.resolved.emplace_back("gm_max", fmt17(gm_max));
    r.resolved.emplace_back("ctrl_gain", fmt17(cfg.ctrl_gain));
    r.resolved.emplace_back("lpf_fc", fmt17(cfg.lpf_fc));
    r.resolved.emplace_back("env_depth", fmt17(env_depth));
    r.resolved.emplace_back("env_periods", fmt17(env_periods));
    r.derived = {{"delta_min", gm_min * step_per_gm},
                 {"delta_max", gm_max * step_per_gm},
                 {"Ts", base.Ts()},
                 {"dt", base.dt}};
    r.outputs = {"input.csv", "staircase.csv", "gm_trace.csv", "step_trace.csv", "steps.csv"};
    r.plot_script =
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 't (s)'\nset ylabel 'V'\n"
        "plot 'input.csv' using 1:2 with lines, 'staircase.csv' using 1:2 with steps, \\\n"
        "     'step_trace.csv' using 1:2 with lines\n";
    return r;
}

RunResult run_compress(const Params& p, const std::filesystem::path& dir) {
    const CompressorCircuit c{OtaParams{p.num("gm")},
                              DiodeParams{p.num("Is"), p.num_or("n", 2.0), p.num_or("T", 300.0)}};
    const double v_max = p.num_or("v_max", 2.5);
    const int points = p.integer("points", 256);

    const TransferCurve curve =
        sweep_transfer([&](double v) { return compressor_circuit_dc(c, v); }, 0.0, v_max, points);
    write_transfer_csv(dir / "transfer.csv", curve);

    RunResult r;
    r.summary = {
        {"experiment", "compress"},
        {"effective_mu", format_double(compressor_effective_mu(c))},
        {"x_scale", format_double(c.x_scale)},
        {"v_out_at_v_max", format_double(curve.points.back().second)},
    };
    if (p.has("mu_reference")) {
        r.summary.emplace_back("mu_reference", format_double(p.num("mu_reference")));
    }
    r.resolved = {{"gm", fmt17(c.ota.gm)},      {"Is", fmt17(c.diode.Is)},
                  {"n", fmt17(c.diode.n)},      {"T", fmt17(c.diode.T)},
                  {"v_max", fmt17(v_max)},      {"points", std::to_string(points)}};
    if (p.has("mu_reference")) r.resolved.emplace_back("mu_reference", fmt17(p.num("mu_reference")));
    r.derived = {{"effective_mu", compressor_effective_mu(c)}, {"x_scale", c.x_scale}};
    r.outputs = {"transfer.csv"};
    r.plot_script =
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 'V_in (V)'\nset ylabel 'V_out (V)'\n"
        "plot 'transfer.csv' using 1:2 with lines\n";
    return r;
}

RunResult run_expand(const Params& p, const std::filesystem::path& dir) {
    const ExpanderCircuit e{p.num("gm1"), p.num("gm2"), p.num("gm3"),
                            DiodeParams{p.num("Is"), p.num_or("n", 1.0), p.num_or("T", 300.0)}};
    const double v_max = p.num_or("v_max", 0.18);
    const int points = p.integer("points", 256);
    (void)expander_circuit_dc(e, v_max); // reject an out-of-range exponent before sweeping

    const TransferCurve curve =
        sweep_transfer([&](double v) { return expander_circuit_dc(e, v); }, 0.0, v_max, points);
    write_transfer_csv(dir / "transfer.csv", curve);

    RunResult r;
    r.summary = {
        {"experiment", "expand"},
        {"effective_mu", format_double(expander_effective_mu(e))},
        {"v_out_at_v_max", format_double(curve.points.back().second)},
    };
    r.resolved = {{"gm1", fmt17(e.gm1)},   {"gm2", fmt17(e.gm2)},
                  {"gm3", fmt17(e.gm3)},   {"Is", fmt17(e.diode.Is)},
                  {"n", fmt17(e.diode.n)}, {"T", fmt17(e.diode.T)},
                  {"v_max", fmt17(v_max)}, {"points", std::to_string(points)}};
    r.derived = {{"effective_mu", expander_effective_mu(e)}};
    r.outputs = {"transfer.csv"};
    r.plot_script =
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 'V_in (V)'\nset ylabel 'V_out (V)'\n"
        "plot 'transfer.csv' using 1:2 with lines\n";
    return r;
}

RunResult run_roundtrip(const Params& p, const std::filesystem::path& dir) {
    const CompressorCircuit c{OtaParams{p.num("gm")},
                              DiodeParams{p.num("Is"), p.num_or("n", 2.0), p.num_or("T", 300.0)}};
    const ExpanderCircuit e = matched_expander(c);
    const double v_max = p.num_or("v_max", 2.5);
    const int points = p.integer("points", 4096);

    const double duration = 1e-3; // the published ramp spans 0..1 ms
    const Waveform input = ramp(0.0, v_max, duration / points, duration);
    const Waveform compressed =
        map_samples(input, [&](double v) {
            return std::copysign(compressor_circuit_dc(c, std::fabs(v)), v);
        });
    const Waveform output = compand_roundtrip(c, e, input);

    double worst_rel = 0.0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double v = input[i];
        if (std::fabs(v) < 0.05 * v_max) continue;
        worst_rel = std::max(worst_rel, std::fabs(output[i] - v) / std::fabs(v));
    }

    write_waveform_csv(dir / "input.csv", input);
    write_waveform_csv(dir / "compressed.csv", compressed);
    write_waveform_csv(dir / "output.csv", output);

    RunResult r;
    r.summary = {
        {"experiment", "roundtrip"},
        {"effective_mu", format_double(compressor_effective_mu(c))},
        {"max_rel_error_above_5pct_fs", format_double(worst_rel)},
        {"sqnr_db", format_double(sqnr_db(input, output))},
    };
    r.resolved = {{"gm", fmt17(c.ota.gm)}, {"Is", fmt17(c.diode.Is)},
                  {"n", fmt17(c.diode.n)}, {"T", fmt17(c.diode.T)},
                  {"v_max", fmt17(v_max)}, {"points", std::to_string(points)}};
    r.derived = {{"effective_mu", compressor_effective_mu(c)}};
    r.outputs = {"input.csv", "compressed.csv", "output.csv"};
    r.plot_script =
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 't (s)'\nset ylabel 'V'\n"
        "plot 'input.csv' using 1:2 with lines, 'compressed.csv' using 1:2 with lines, \\\n"
        "     'output.csv' using 1:2 with lines\n";
    return r;
}

RunResult dispatch(ExperimentKind kind, const Params& p, const std::filesystem::path& dir);

RunResult run_sweep(const Params& p, const std::map<std::string, std::string>& raw,
                    const std::filesystem::path& dir) {
    const std::string sub_name = p.str("sweep_experiment");
    const ExperimentKind sub = experiment_from_name(sub_name);
    if (sub == ExperimentKind::sweep) throw ConfigError("cannot sweep a sweep");
    const std::string param = p.str("sweep_param");
    if (!key_allowed(sub, param)) {
        throw ConfigError("sweep_param '" + param + "' is not a parameter of " + sub_name);
    }

    std::vector<std::string> values;
    {
        std::istringstream in(p.str("sweep_values"));
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) throw ConfigError("empty entry in sweep_values");
            (void)parse_si_value(item);
            values.push_back(item);
        }
    }
    if (values.empty()) throw ConfigError("sweep_values must list at least one value");

    std::map<std::string, std::string> base;
    for (const auto& [k, v] : raw) {
        if (k.rfind("sweep_", 0) == 0) continue;
        if (!key_allowed(sub, k)) {
            throw ConfigError("unknown parameter '" + k + "' for swept experiment " + sub_name);
        }
        base[k] = v;
    }

    // Points are independent; run them concurrently and merge in order.
    std::vector<std::future<RunResult>> futures;
    for (std::size_t i = 0; i < values.size(); ++i) {
        futures.push_back(std::async(std::launch::async, [&, i]() {
            auto point = base;
            point[param] = values[i];
            char sub_dir[32];
            std::snprintf(sub_dir, sizeof sub_dir, "point_%03zu", i);
            const auto point_dir = dir / sub_dir;
            std::error_code ec;
            std::filesystem::create_directories(point_dir, ec);
            if (ec) throw IoError("cannot create " + point_dir.string());
            Params pp(point);
            return dispatch(sub, pp, point_dir);
        }));
    }
    std::vector<RunResult> results;
    results.reserve(values.size());
    for (auto& f : futures) results.push_back(f.get());

    std::ostringstream csv;
    csv << param;
    for (const auto& [k, v] : results.front().summary) csv << ',' << k;
    csv << '\n';
    for (std::size_t i = 0; i < results.size(); ++i) {
        csv << format_double(parse_si_value(values[i]));
        for (const auto& [k, v] : results[i].summary) csv << ',' << v;
        csv << '\n';
    }
    write_text(dir / "sweep.csv", csv.str());

    RunResult r;
    r.summary = {
        {"experiment", "sweep"},
        {"swept_experiment", sub_name},
        {"swept_param", param},
        {"point_count", std::to_string(values.size())},
    };
    r.resolved.emplace_back("sweep_experiment", sub_name);
    r.resolved.emplace_back("sweep_param", param);
    r.resolved.emplace_back("sweep_values", p.str("sweep_values"));
    for (const auto& [k, v] : base) r.resolved.emplace_back(k, v);
    r.derived = {{"point_count", values.size()}};
    r.outputs = {"sweep.csv"};
    for (std::size_t i = 0; i < results.size(); ++i) {
        char sub_dir[32];
        std::snprintf(sub_dir, sizeof sub_dir, "point_%03zu", i);
        for (const auto& f : results[i].outputs) {
            r.outputs.push_back(std::string(sub_dir) + "/" + f);
        }
    }
    return r;
}

RunResult dispatch(ExperimentKind kind, const Params& p, const std::filesystem::path& dir) {
    switch (kind) {
        case ExperimentKind::dm: return run_dm(p, dir);
        case ExperimentKind::cvsd: return run_cvsd(p, dir);
        case ExperimentKind::compress: return run_compress(p, dir);
        case ExperimentKind::expand: return run_expand(p, dir);
        case ExperimentKind::roundtrip: return run_roundtrip(p, dir);
        case ExperimentKind::sweep: break;
    }
    throw ConfigError("dispatch called with sweep kind"); // handled by run_sweep
}

} // namespace

// ---------------------------------------------------------------------------
// Public surface
// ---------------------------------------------------------------------------

ExperimentKind experiment_from_name(const std::string& name) {
    if (name == "dm") return ExperimentKind::dm;
    if (name == "cvsd") return ExperimentKind::cvsd;
    if (name == "compress") return ExperimentKind::compress;
    if (name == "expand") return ExperimentKind::expand;
    if (name == "roundtrip") return ExperimentKind::roundtrip;
    if (name == "sweep") return ExperimentKind::sweep;
    throw ConfigError("unknown experiment '" + name + "'");
}

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::dm: return "dm";
        case ExperimentKind::cvsd: return "cvsd";
        case ExperimentKind::compress: return "compress";
        case ExperimentKind::expand: return "expand";
        case ExperimentKind::roundtrip: return "roundtrip";
        case ExperimentKind::sweep: return "sweep";
    }
    return "?";
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = {
        {"paper-fig7",
         ExperimentKind::dm,
         {{"fm", "10MHz"},
          {"k", "8"},
          {"V", "1"},
          {"gm3", "100uA/V"},
          {"C1", "1.25pF"},
          {"amp", "0.5V"},
          {"periods", "40"},
          {"enforce_gm_range", "1"}},
         "Fig. 7 (linear DM, 10 MHz input, 250 mV step)"},
        {"paper-fig8",
         ExperimentKind::cvsd,
         {{"fm", "10MHz"},
          {"fs", "90MHz"},
          {"V", "1"},
          {"C1", "0.5pF"},
          {"gm_min", "28uA/V"},
          {"gm_max", "81uA/V"},
          {"ctrl_gain", "62.5u"},
          {"lpf_fc", "7.5MHz"},
          {"amp", "2.5V"},
          {"env_depth", "1"},
          {"env_periods", "30"},
          {"periods", "60"}},
         "Fig. 8 (adaptive DM, 10 MHz input, 90 MHz sampling, 0.4..0.9 V step)"},
        {"paper-fig5",
         ExperimentKind::compress,
         {{"gm", "10mA/V"},
          {"Is", "28.5uA"},
          {"n", "2"},
          {"T", "300K"},
          {"v_max", "2.5V"},
          {"points", "256"},
          {"mu_reference", "350"}},
         "Fig. 5 (compressor transfer, 0..2.5 V ramp)"},
        {"paper-fig6",
         ExperimentKind::expand,
         {{"gm1", "10mA/V"},
          {"gm2", "10mA/V"},
          {"gm3", "10mA/V"},
          {"Is", "28.5uA"},
          {"n", "1"},
          {"T", "300K"},
          {"v_max", "0.18V"},
          {"points", "256"}},
         "Fig. 6 (expander transfer)"},
        {"paper-table1-row1",
         ExperimentKind::compress,
         {{"gm", "10mA/V"},
          {"Is", "28.5uA"},
          {"n", "2"},
          {"T", "300K"},
          {"v_max", "2.5V"},
          {"points", "256"},
          {"mu_reference", "350"}},
         "Table 1 row 1 (mu = 350)"},
        {"paper-table1-row2",
         ExperimentKind::compress,
         {{"gm", "9mA/V"},
          {"Is", "39.5uA"},
          {"n", "2"},
          {"T", "300K"},
          {"v_max", "2.5V"},
          {"points", "256"},
          {"mu_reference", "230"}},
         "Table 1 row 2 (mu = 230)"},
        {"paper-table1-row3",
         ExperimentKind::compress,
         {{"gm", "8mA/V"},
          {"Is", "39.5uA"},
          {"n", "2"},
          {"T", "300K"},
          {"v_max", "2.5V"},
          {"points", "256"},
          {"mu_reference", "204"}},
         "Table 1 row 3 (mu = 204)"},
        {"mu255",
         ExperimentKind::roundtrip,
         {{"gm", "10.2mA/V"},
          {"Is", "40uA"},
          {"n", "2"},
          {"T", "300K"},
          {"v_max", "2.5V"},
          {"points", "4096"}},
         "mu = 255 compander (the classic operating value)"},
    };
    return table;
}

const Preset* find_preset(const std::string& name) {
    for (const auto& p : presets()) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

std::string list_presets_text() {
    std::ostringstream out;
    for (const auto& p : presets()) {
        out << p.name << "  [" << experiment_name(p.kind) << "]  " << p.anchor << '\n';
        for (const auto& [k, v] : p.params) out << "    " << k << " = " << v << '\n';
    }
    return out.str();
}

ExperimentConfig build_config(const std::string& experiment, const std::string& preset_name,
                              const std::filesystem::path& config_file,
                              const std::vector<std::string>& set_overrides,
                              const std::filesystem::path& output_dir, std::uint64_t seed,
                              bool gnuplot_stub) {
    ExperimentConfig cfg;
    cfg.kind = experiment_from_name(experiment);
    cfg.output_dir = output_dir;
    cfg.seed = seed;
    cfg.gnuplot_stub = gnuplot_stub;

    auto accept = [&](const std::string& key, const std::string& value, const std::string& from) {
        const bool nested_ok = cfg.kind == ExperimentKind::sweep && !key.empty() &&
                               key.rfind("sweep_", 0) != 0;
        if (!key_allowed(cfg.kind, key) && !nested_ok) {
            throw ConfigError("unknown parameter '" + key + "' for experiment " + experiment +
                              " (" + from + ")");
        }
        cfg.params[key] = value;
    };

    if (!preset_name.empty()) {
        const Preset* p = find_preset(preset_name);
        if (!p) throw ConfigError("unknown preset '" + preset_name + "'");
        if (p->kind != cfg.kind) {
            throw ConfigError("preset '" + preset_name + "' belongs to experiment " +
                              experiment_name(p->kind) + ", not " + experiment);
        }
        cfg.preset = preset_name;
        for (const auto& [k, v] : p->params) cfg.params[k] = v;
    }

    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) throw ConfigError("cannot open config file " + config_file.string());
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError(config_file.string() + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty()) {
                throw ConfigError(config_file.string() + ":" + std::to_string(line_no) +
                                  ": expected 'key = value'");
            }
            accept(key, value, config_file.string() + ":" + std::to_string(line_no));
        }
    }

    for (const auto& kv : set_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        accept(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)), "--set");
    }

    // Required keys must be present before any simulation starts.
    for (const auto& key : keys_for(cfg.kind).required) {
        if (cfg.params.count(key) == 0) {
            throw ConfigError("missing required parameter '" + key + "' for experiment " +
                              experiment);
        }
    }
    return cfg;
}

void run_experiment(const ExperimentConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + cfg.output_dir.string());

    Params p(cfg.params);
    RunResult result;
    try {
        result = cfg.kind == ExperimentKind::sweep ? run_sweep(p, cfg.params, cfg.output_dir)
                                                   : dispatch(cfg.kind, p, cfg.output_dir);
    } catch (const std::future_error& e) {
        throw SimulationError(std::string("sweep point failed: ") + e.what());
    }

    const std::string summary = summary_text(result.summary);
    write_text(cfg.output_dir / "summary.txt", summary);
    std::cout << summary;

    std::ostringstream resolved;
    for (const auto& [k, v] : result.resolved) resolved << k << " = " << v << '\n';
    write_text(cfg.output_dir / "resolved.cfg", resolved.str());

    json manifest;
    manifest["version"] = kVersion;
    manifest["experiment"] = experiment_name(cfg.kind);
    manifest["preset"] = cfg.preset;
    manifest["seed"] = cfg.seed;
    json params = json::object();
    for (const auto& [k, v] : result.resolved) params[k] = v;
    manifest["parameters"] = params;
    manifest["derived"] = result.derived;
    json outputs = json::array();
    outputs.push_back("summary.txt");
    outputs.push_back("resolved.cfg");
    for (const auto& f : result.outputs) outputs.push_back(f);
    if (cfg.gnuplot_stub && !result.plot_script.empty()) outputs.push_back("plot.gp");
    manifest["outputs"] = outputs;
    write_text(cfg.output_dir / "manifest.json", manifest.dump(2) + "\n");

    if (cfg.gnuplot_stub && !result.plot_script.empty()) {
        write_text(cfg.output_dir / "plot.gp", result.plot_script);
    }
}

} // namespace otacomm
