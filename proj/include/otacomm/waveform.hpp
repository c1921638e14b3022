#pragma once

#include <cstddef>
#include <vector>

namespace otacomm {

/// Uniformly sampled real-valued signal. The universal carrier for every
/// voltage trace in the library: dt is the simulation step, t0 the start
/// time, samples the values in volts (unless stated otherwise).
///
/// Immutable after construction; construction validates dt > 0, at least
/// one sample, and that every sample is finite.
class Waveform {
public:
    Waveform(double dt, double t0, std::vector<double> samples);

    /// All-zero waveform of n samples starting at t = 0.
    static Waveform zeros(double dt, std::size_t n);

    double dt() const noexcept { return dt_; }
    double t0() const noexcept { return t0_; }
    const std::vector<double>& samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    double operator[](std::size_t i) const noexcept { return samples_[i]; }
    double front() const noexcept { return samples_.front(); }
    double back() const noexcept { return samples_.back(); }

    double time_at(std::size_t i) const noexcept { return t0_ + dt_ * static_cast<double>(i); }
    double duration() const noexcept { return dt_ * static_cast<double>(samples_.size()); }

    /// Same dt, t0 and length (the precondition for sample-wise operations).
    bool same_grid(const Waveform& other) const noexcept;

private:
    double dt_;
    double t0_;
    std::vector<double> samples_;
};

/// Two-level channel symbol sequence, every symbol +1 or -1, emitted at
/// one symbol per Ts seconds.
class BitStream {
public:
    BitStream(double Ts, std::vector<int> symbols);

    double Ts() const noexcept { return Ts_; }
    const std::vector<int>& symbols() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }
    int operator[](std::size_t i) const noexcept { return symbols_[i]; }

private:
    double Ts_;
    std::vector<int> symbols_;
};

/// amplitude * sin(2*pi*frequency*(t0 + i*dt) + phase), t0 = 0,
/// length = round(duration/dt).
Waveform sine(double amplitude, double frequency, double phase, double dt, double duration);

/// Linear sweep from v_start at t = 0 to v_end at t = duration,
/// length = round(duration/dt); the endpoint itself is not emitted.
Waveform ramp(double v_start, double v_end, double dt, double duration);

/// Amplitude-modulated tone: a sine carrier whose envelope swings between
/// amplitude*(1 - env_depth) (at t = 0) and amplitude, once per 1/env_freq.
/// env_depth = 0 reduces to sine(). The quiet/loud passages exercise
/// syllabic step-size adaptation.
Waveform am_sine(double amplitude, double frequency, double phase, double env_depth,
                 double env_freq, double dt, double duration);

/// Half-symbol gate p(t) = u(t) - u(t - Ts/2): 1 on [0, Ts/2), else 0.
double pulse_shape(double t, double Ts);

} // namespace otacomm
