#include "otacomm/delta_mod.hpp"

#include "otacomm/blocks.hpp"
#include "otacomm/errors.hpp"

#include <cmath>
#include <sstream>

namespace otacomm {

namespace {

void validate(const DmConfig& cfg) {
    if (!std::isfinite(cfg.fm) || cfg.fm <= 0.0) throw ValidationError("DmConfig fm must be > 0");
    if (!std::isfinite(cfg.fs) || cfg.fs <= 0.0) throw ValidationError("DmConfig fs must be > 0");
    if (cfg.fs <= 2.0 * cfg.fm) {
        std::ostringstream msg;
        msg << "DmConfig fs must exceed 2*fm, got fs = " << cfg.fs << " Hz with fm = " << cfg.fm;
        throw ValidationError(msg.str());
    }
    if (cfg.k && *cfg.k < 2) throw ValidationError("DmConfig oversampling factor k must be >= 2");
    QuantizerParams{cfg.V};
    OtaParams{cfg.gm3};
    if (cfg.enforce_gm_range && !gm_within_dm_range(cfg.gm3)) {
        std::ostringstream msg;
        msg << "DmConfig gm3 = " << cfg.gm3 << " A/V outside the enforced 70e-6..120e-6 window";
        throw ValidationError(msg.str());
    }
    if (!std::isfinite(cfg.C1) || cfg.C1 <= 0.0) throw ValidationError("DmConfig C1 must be > 0");
    if (!std::isfinite(cfg.dt) || cfg.dt <= 0.0) throw ValidationError("DmConfig dt must be > 0");
    if (cfg.dt > cfg.Ts() / 32.0 * (1.0 + 1e-12)) {
        throw ValidationError("DmConfig dt must be <= Ts/32");
    }
    const double steps = cfg.Ts() / cfg.dt;
    const double rounded = std::round(steps);
    if (std::fabs(steps - rounded) > 1e-9 * steps || std::fmod(rounded, 2.0) != 0.0) {
        throw ValidationError("DmConfig dt must divide Ts into an even whole number of steps");
    }
}

DmConfig make_config(double fm, double fs, std::optional<int> k, double V, double gm3, double C1,
                     int spp, bool enforce) {
    if (spp < 32 || spp % 2 != 0) {
        throw ValidationError("samples_per_symbol must be an even integer >= 32");
    }
    DmConfig cfg{fm, fs, k, V, gm3, C1, (1.0 / fs) / static_cast<double>(spp), enforce};
    validate(cfg);
    return cfg;
}

} // namespace

DmConfig DmConfig::from_oversampling(double fm, int k, double V, double gm3, double C1,
                                     int samples_per_symbol, bool enforce_gm_range) {
    if (k < 2) throw ValidationError("DmConfig oversampling factor k must be >= 2");
    return make_config(fm, 2.0 * k * fm, k, V, gm3, C1, samples_per_symbol, enforce_gm_range);
}

DmConfig DmConfig::with_sampling_rate(double fm, double fs, double V, double gm3, double C1,
                                      int samples_per_symbol, bool enforce_gm_range) {
    return make_config(fm, fs, std::nullopt, V, gm3, C1, samples_per_symbol, enforce_gm_range);
}

int DmConfig::samples_per_symbol() const noexcept {
    return static_cast<int>(std::llround(Ts() / dt));
}

double dm_step_size(const DmConfig& cfg) {
    validate(cfg);
    return cfg.gm3 * cfg.V * cfg.Ts() / (2.0 * cfg.C1);
}

DmReferenceResult dm_encode_reference(const std::vector<double>& input_sampled, double delta) {
    if (input_sampled.empty()) throw ValidationError("dm_encode_reference input must be non-empty");
    if (!std::isfinite(delta) || delta <= 0.0) {
        throw ValidationError("dm_encode_reference delta must be > 0");
    }
    DmReferenceResult out;
    out.bits.reserve(input_sampled.size());
    out.staircase.reserve(input_sampled.size());
    double m = 0.0;
    for (double x : input_sampled) {
        const int d = x >= m ? 1 : -1;
        m += delta * static_cast<double>(d);
        out.bits.push_back(d);
        out.staircase.push_back(m);
    }
    return out;
}

std::vector<double> dm_decode(const BitStream& bits, double delta) {
    if (!std::isfinite(delta) || delta <= 0.0) throw ValidationError("dm_decode delta must be > 0");
    std::vector<double> out;
    out.reserve(bits.size());
    double m = 0.0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
        m += delta * static_cast<double>(bits[i]);
        out.push_back(m);
    }
    return out;
}

DmOutput dm_encode_circuit(const DmConfig& cfg, const Waveform& input) {
    validate(cfg);
    if (std::fabs(input.dt() - cfg.dt) > 1e-12 * cfg.dt) {
        std::ostringstream msg;
        msg << "input grid dt = " << input.dt() << " s does not match config dt = " << cfg.dt;
        throw ValidationError(msg.str());
    }
    const auto m = static_cast<std::size_t>(cfg.samples_per_symbol());
    if (input.size() < 3 * m) {
        throw ValidationError("dm_encode_circuit input must span at least 3 symbol periods");
    }

    const std::size_t half = m / 2;
    const double delta = cfg.gm3 * cfg.V * cfg.Ts() / (2.0 * cfg.C1);
    const double ramp_step = cfg.gm3 / cfg.C1 * cfg.dt * cfg.V; // Euler increment while gated on

    std::vector<int> bits;
    bits.reserve(input.size() / m + 1);
    std::vector<double> stair(input.size());
    std::vector<double> error(input.size());

    // Boundary values follow the accumulator recursion m += delta*a, which
    // forward Euler reproduces exactly for the piecewise-constant drive;
    // intra-symbol samples are the Euler partial sums of the gated ramp.
    double level = 0.0; // integrator state at the symbol boundary, zero initial condition
    for (std::size_t start = 0; start < input.size(); start += m) {
        const int a = input[start] >= level ? 1 : -1; // comparator latched at the sampling instant
        bits.push_back(a);
        const double next = level + delta * static_cast<double>(a);
        const std::size_t end = std::min(start + m, input.size());
        for (std::size_t i = start; i < end; ++i) {
            const std::size_t j = i - start;
            stair[i] = j < half ? level + ramp_step * static_cast<double>(a) * static_cast<double>(j)
                                : next;
            error[i] = input[i] - stair[i];
        }
        level = next;
    }

    return DmOutput{
        BitStream(cfg.Ts(), std::move(bits)),
        Waveform(input.dt(), input.t0(), std::move(stair)),
        Waveform(input.dt(), input.t0(), std::move(error)),
    };
}

} // namespace otacomm
