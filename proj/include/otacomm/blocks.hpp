#pragma once

#include "otacomm/waveform.hpp"

namespace otacomm {

// Physical constants as used throughout the node equations.
inline constexpr double kBoltzmann = 1.381e-23;      // J/K
inline constexpr double kElectronCharge = 1.6e-19;   // C

/// Ideal transconductor: i_out = gm * (v+ - v-), infinite input and
/// output impedance.
struct OtaParams {
    double gm; // A/V

    explicit OtaParams(double gm);
};

/// gm window the delta-modulator application accepts when range
/// enforcement is on (70 to 120 uA/V).
bool gm_within_dm_range(double gm) noexcept;

/// gm window the compander circuits accept (1 to 50 mA/V, the tuning
/// range that realizes the usable mu values).
bool gm_within_compander_range(double gm) noexcept;

/// Junction diode: I = Is * (exp(V/(n*VT)) - 1), VT = K*T/q.
struct DiodeParams {
    double Is; // reverse saturation current, A
    double n;  // emission coefficient, 1..2
    double T;  // absolute temperature, K

    explicit DiodeParams(double Is, double n = 2.0, double T = 300.0);

    double thermal_voltage() const noexcept; // K*T/q
};

/// Two-level quantizer output magnitude (the +V / -V supply levels).
struct QuantizerParams {
    double V; // volts

    explicit QuantizerParams(double V);
};

double ota_current(const OtaParams& p, double v_plus, double v_minus);

/// Diode law with the exponent clamped to +-60 before exponentiation.
double diode_current(const DiodeParams& d, double v);

/// Node voltage at which the diode sinks i_in. Closed form
/// v = n*VT*ln(1 + i_in/Is); throws NoSolutionError when i_in <= -Is.
double solve_diode_node(const DiodeParams& d, double i_in);

/// Bisection route to the same node voltage, kept as the reference path
/// for validating the closed form. Residual tolerance
/// max(1e-15 A, 1e-12*|i_in|).
double solve_diode_node_bisect(const DiodeParams& d, double i_in);

/// OTA + grounded capacitor integrator, forward Euler on the input grid:
/// dv/dt = (gm/C) * input(t), v(t0) = v_init. Output has one more sample
/// than the input (state at every interval boundary), so integrating a
/// constant V over N*dt rises by exactly gm*V*N*dt/C.
Waveform integrate_ota_c(const OtaParams& p, double C, const Waveform& input, double v_init);

/// +V when v_in >= v_ref, else -V. The tie resolves to +V.
double two_level_quantize(const QuantizerParams& q, double v_in, double v_ref);

/// Zero-order hold at rate fs on the waveform's own grid. 1/fs must be a
/// whole number of grid steps (within 1e-9 relative).
Waveform sample_hold(const Waveform& input, double fs);

/// Sample-wise absolute value (full-wave rectifier).
Waveform rectify(const Waveform& input);

/// One-pole low-pass, y[i] = y[i-1] + a*(x[i] - y[i-1]) with
/// a = 1 - exp(-2*pi*fc*dt); DC gain exactly 1. Requires 0 < fc < 1/(2*dt).
Waveform lowpass_one_pole(const Waveform& input, double fc, double v_init);

} // namespace otacomm
