#include "otacomm/cvsd.hpp"

#include "otacomm/blocks.hpp"
#include "otacomm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace otacomm {

namespace {

void validate(const CvsdConfig& cfg) {
    dm_step_size(cfg.base); // runs the full DmConfig validation
    // gm_min == gm_max is the adaptation-disabled degenerate case.
    if (!(cfg.gm_min > 0.0) || !(cfg.gm_max >= cfg.gm_min)) {
        throw ValidationError("CvsdConfig requires 0 < gm_min <= gm_max");
    }
    if (cfg.base.gm3 < cfg.gm_min || cfg.base.gm3 > cfg.gm_max) {
        throw ValidationError("CvsdConfig base.gm3 must start inside [gm_min, gm_max]");
    }
    if (!std::isfinite(cfg.ctrl_gain) || cfg.ctrl_gain <= 0.0) {
        throw ValidationError("CvsdConfig ctrl_gain must be > 0");
    }
    if (!std::isfinite(cfg.lpf_fc) || cfg.lpf_fc <= 0.0 || cfg.lpf_fc >= cfg.base.fs / 10.0) {
        std::ostringstream msg;
        msg << "CvsdConfig lpf_fc must lie in (0, fs/10) = (0, " << cfg.base.fs / 10.0
            << ") Hz, got " << cfg.lpf_fc;
        throw ValidationError(msg.str());
    }
}

struct LoopState {
    double stair;  // integrator output
    double smooth; // low-pass estimate of the integrator output (DC block)
    double vctrl;  // filtered rectified ripple
    double gm;     // current transconductance
};

/// One simulation loop shared by encoder, decoder and the ctrl_gain
/// calibration: identical arithmetic on all three paths is what makes the
/// decoder an exact replica of the encoder.
template <typename NextBit>
CvsdOutput run_loop(const CvsdConfig& cfg, std::size_t n_samples, NextBit&& next_bit) {
    const auto m = static_cast<std::size_t>(cfg.base.samples_per_symbol());
    const std::size_t half = m / 2;
    const double dt = cfg.base.dt;
    const double inv_c = 1.0 / cfg.base.C1;
    const double V = cfg.base.V;
    const double step_per_gm = V * cfg.base.Ts() / (2.0 * cfg.base.C1);
    const double alpha = 1.0 - std::exp(-2.0 * M_PI * cfg.lpf_fc * dt);

    std::vector<int> bits;
    bits.reserve(n_samples / m + 1);
    std::vector<double> stair(n_samples);
    std::vector<double> gm_trace(n_samples);
    std::vector<double> step_trace(n_samples);

    LoopState s{};
    s.stair = 0.0;
    s.smooth = 0.0;
    // Seed the control voltage so the loop starts at base.gm3.
    s.vctrl = (cfg.base.gm3 - cfg.gm_min) / cfg.ctrl_gain;
    s.gm = std::clamp(cfg.gm_min + cfg.ctrl_gain * s.vctrl, cfg.gm_min, cfg.gm_max);

    int a = 1;
    for (std::size_t i = 0; i < n_samples; ++i) {
        if (i % m == 0) {
            a = next_bit(i / m, s.stair);
            bits.push_back(a);
        }
        stair[i] = s.stair;
        gm_trace[i] = s.gm;
        step_trace[i] = s.gm * step_per_gm;

        const double drive = (i % m < half) ? V * static_cast<double>(a) : 0.0;
        s.stair += s.gm * inv_c * dt * drive;
        s.smooth += alpha * (s.stair - s.smooth);
        const double ripple = std::fabs(s.stair - s.smooth);
        s.vctrl += alpha * (ripple - s.vctrl);
        s.gm = std::clamp(cfg.gm_min + cfg.ctrl_gain * s.vctrl, cfg.gm_min, cfg.gm_max);
    }

    const double dt_out = cfg.base.dt;
    return CvsdOutput{
        BitStream(cfg.base.Ts(), std::move(bits)),
        Waveform(dt_out, 0.0, std::move(stair)),
        Waveform(dt_out, 0.0, std::move(gm_trace)),
        Waveform(dt_out, 0.0, std::move(step_trace)),
    };
}

} // namespace

double cvsd_default_ctrl_gain(const DmConfig& base, double gm_min, double gm_max, double lpf_fc) {
    if (gm_max == gm_min) return 1.0; // adaptation disabled, any gain is inert
    const auto m = static_cast<std::size_t>(base.samples_per_symbol());
    const std::size_t n = 20 * m;
    const double goal = 0.9 * gm_max;

    auto gm_after_overload = [&](double gain) {
        CvsdConfig probe{base, gm_min, gm_max, gain, lpf_fc};
        probe.base.gm3 = gm_min; // calibration starts from the smallest step
        const auto out = run_loop(probe, n, [](std::size_t, double) { return 1; });
        return out.gm_trace.back();
    };

    double lo = 1e-12, hi = 1e-12;
    while (gm_after_overload(hi) < goal) {
        hi *= 4.0;
        if (hi > 1e12) throw NonConvergenceError("ctrl_gain calibration failed to bracket");
    }
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (gm_after_overload(mid) < goal) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return hi;
}

CvsdConfig CvsdConfig::make(const DmConfig& base, double gm_min, double gm_max,
                            std::optional<double> ctrl_gain, std::optional<double> lpf_fc) {
    const double fc = lpf_fc.value_or(base.fs / 50.0);
    // Validate the bounds with a placeholder gain before any calibration run.
    CvsdConfig cfg{base, gm_min, gm_max, ctrl_gain.value_or(1.0), fc};
    validate(cfg);
    if (!ctrl_gain) {
        cfg.ctrl_gain = cvsd_default_ctrl_gain(base, gm_min, gm_max, fc);
        validate(cfg);
    }
    return cfg;
}

CvsdOutput cvsd_encode(const CvsdConfig& cfg, const Waveform& input) {
    validate(cfg);
    if (std::fabs(input.dt() - cfg.base.dt) > 1e-12 * cfg.base.dt) {
        throw ValidationError("cvsd_encode input grid does not match the configured dt");
    }
    const auto m = static_cast<std::size_t>(cfg.base.samples_per_symbol());
    if (input.size() < 3 * m) {
        throw ValidationError("cvsd_encode input must span at least 3 symbol periods");
    }
    return run_loop(cfg, input.size(), [&](std::size_t sym, double stair) {
        return input[sym * m] >= stair ? 1 : -1;
    });
}

Waveform cvsd_decode(const BitStream& bits, const CvsdConfig& cfg) {
    validate(cfg);
    if (bits.size() == 0) throw ValidationError("cvsd_decode bits must be non-empty");
    const auto m = static_cast<std::size_t>(cfg.base.samples_per_symbol());
    auto out = run_loop(cfg, bits.size() * m,
                        [&](std::size_t sym, double) { return bits[sym]; });
    return out.staircase;
}

} // namespace otacomm
