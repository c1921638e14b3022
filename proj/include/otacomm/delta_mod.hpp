#pragma once

#include "otacomm/waveform.hpp"

#include <optional>
#include <vector>

namespace otacomm {

/// Symbol periods excluded from every measured metric (zero-initial-
/// condition transient).
inline constexpr int kAcquisitionSymbols = 4;

/// Full parameterization of the linear delta modulator circuit: input
/// frequency fm, sampling rate fs (2*k*fm unless overridden), quantizer
/// level V, integrator transconductance gm3 and capacitance C1, and the
/// simulation step dt. dt always divides the symbol period Ts into an
/// even whole number of steps, at least 32.
struct DmConfig {
    double fm;            // Hz
    double fs;            // Hz
    std::optional<int> k; // oversampling factor when built from (fm, k)
    double V;             // quantizer level, volts
    double gm3;           // A/V
    double C1;            // farads
    double dt;            // seconds
    bool enforce_gm_range = false;

    /// fs = 2*k*fm, dt = Ts/samples_per_symbol.
    static DmConfig from_oversampling(double fm, int k, double V, double gm3, double C1,
                                      int samples_per_symbol = 32, bool enforce_gm_range = false);

    /// Explicit fs (need not be an even multiple of fm, but fs > 2*fm).
    static DmConfig with_sampling_rate(double fm, double fs, double V, double gm3, double C1,
                                       int samples_per_symbol = 32, bool enforce_gm_range = false);

    double Ts() const noexcept { return 1.0 / fs; }
    int samples_per_symbol() const noexcept;
};

/// Analytic staircase step height: delta = gm3 * V * Ts / (2 * C1).
double dm_step_size(const DmConfig& cfg);

struct DmReferenceResult {
    std::vector<int> bits;          // +1 / -1 decisions
    std::vector<double> staircase;  // accumulator value after each decision
};

/// Discrete-time reference model: d[k] = +1 if input[k] >= m[k-1] else -1,
/// m[k] = m[k-1] + delta*d[k], m[-1] = 0.
DmReferenceResult dm_encode_reference(const std::vector<double>& input_sampled, double delta);

/// Accumulator decoder: cumulative sum of the bits scaled by delta,
/// zero initial condition. Exactly reproduces the encoder staircase.
std::vector<double> dm_decode(const BitStream& bits, double delta);

struct DmOutput {
    BitStream bits;     // channel output, one symbol per Ts
    Waveform staircase; // integrator output on the input grid
    Waveform error;     // input minus staircase
};

/// Closed-loop behavioral circuit: comparator against the integrator
/// output, decision latched at each sampling instant, the sampled +-V
/// level driving the OTA3/C1 integrator during the first half of each
/// symbol period (the pulse gate), idle during the second half. Each
/// symbol therefore contributes one ramp of height delta followed by a
/// flat half-period.
DmOutput dm_encode_circuit(const DmConfig& cfg, const Waveform& input);

} // namespace otacomm
