#include "otacomm/waveform.hpp"

#include "otacomm/errors.hpp"

#include <cmath>
#include <string>

namespace otacomm {

namespace {

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw ValidationError(std::string(what) + " must be finite");
    }
}

} // namespace

Waveform::Waveform(double dt, double t0, std::vector<double> samples)
    : dt_(dt), t0_(t0), samples_(std::move(samples)) {
    require_finite(dt_, "Waveform dt");
    require_finite(t0_, "Waveform t0");
    if (dt_ <= 0.0) {
        throw ValidationError("Waveform dt must be > 0, got " + std::to_string(dt_));
    }
    if (samples_.empty()) {
        throw ValidationError("Waveform must contain at least one sample");
    }
    for (double v : samples_) {
        if (!std::isfinite(v)) {
            throw ValidationError("Waveform samples must all be finite");
        }
    }
}

Waveform Waveform::zeros(double dt, std::size_t n) {
    return Waveform(dt, 0.0, std::vector<double>(n, 0.0));
}

bool Waveform::same_grid(const Waveform& other) const noexcept {
    return dt_ == other.dt_ && t0_ == other.t0_ && samples_.size() == other.samples_.size();
}

BitStream::BitStream(double Ts, std::vector<int> symbols)
    : Ts_(Ts), symbols_(std::move(symbols)) {
    if (!std::isfinite(Ts_) || Ts_ <= 0.0) {
        throw ValidationError("BitStream Ts must be finite and > 0");
    }
    for (int s : symbols_) {
        if (s != 1 && s != -1) {
            throw ValidationError("BitStream symbols must be +1 or -1, got " + std::to_string(s));
        }
    }
}

Waveform sine(double amplitude, double frequency, double phase, double dt, double duration) {
    require_finite(amplitude, "sine amplitude");
    require_finite(frequency, "sine frequency");
    require_finite(phase, "sine phase");
    require_finite(dt, "sine dt");
    require_finite(duration, "sine duration");
    if (amplitude < 0.0) throw ValidationError("sine amplitude must be >= 0");
    if (frequency <= 0.0) throw ValidationError("sine frequency must be > 0");
    if (dt <= 0.0) throw ValidationError("sine dt must be > 0");
    if (duration < dt) throw ValidationError("sine duration must be >= dt");

    const auto n = static_cast<std::size_t>(std::llround(duration / dt));
    std::vector<double> s(n);
    const double w = 2.0 * M_PI * frequency;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = amplitude * std::sin(w * (dt * static_cast<double>(i)) + phase);
    }
    return Waveform(dt, 0.0, std::move(s));
}

Waveform ramp(double v_start, double v_end, double dt, double duration) {
    require_finite(v_start, "ramp v_start");
    require_finite(v_end, "ramp v_end");
    require_finite(dt, "ramp dt");
    require_finite(duration, "ramp duration");
    if (dt <= 0.0) throw ValidationError("ramp dt must be > 0");
    if (duration < dt) throw ValidationError("ramp duration must be >= dt");

    const auto n = static_cast<std::size_t>(std::llround(duration / dt));
    std::vector<double> s(n);
    const double slope = (v_end - v_start) / duration;
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = v_start + slope * (dt * static_cast<double>(i));
    }
    return Waveform(dt, 0.0, std::move(s));
}

Waveform am_sine(double amplitude, double frequency, double phase, double env_depth,
                 double env_freq, double dt, double duration) {
    if (env_depth == 0.0) return sine(amplitude, frequency, phase, dt, duration);
    require_finite(env_depth, "am_sine env_depth");
    require_finite(env_freq, "am_sine env_freq");
    if (env_depth < 0.0 || env_depth > 1.0) {
        throw ValidationError("am_sine env_depth must lie in [0, 1]");
    }
    if (env_freq <= 0.0) throw ValidationError("am_sine env_freq must be > 0");
    if (amplitude < 0.0) throw ValidationError("am_sine amplitude must be >= 0");
    if (frequency <= 0.0) throw ValidationError("am_sine frequency must be > 0");
    if (dt <= 0.0 || duration < dt) throw ValidationError("am_sine needs duration >= dt > 0");

    const auto n = static_cast<std::size_t>(std::llround(duration / dt));
    std::vector<double> s(n);
    const double w = 2.0 * M_PI * frequency;
    const double we = 2.0 * M_PI * env_freq;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        const double env = amplitude * (1.0 - env_depth * 0.5 * (1.0 + std::cos(we * t)));
        s[i] = env * std::sin(w * t + phase);
    }
    return Waveform(dt, 0.0, std::move(s));
}

double pulse_shape(double t, double Ts) {
    if (!std::isfinite(t)) throw ValidationError("pulse_shape t must be finite");
    if (!std::isfinite(Ts) || Ts <= 0.0) throw ValidationError("pulse_shape Ts must be > 0");
    return (t >= 0.0 && t < 0.5 * Ts) ? 1.0 : 0.0;
}

} // namespace otacomm
