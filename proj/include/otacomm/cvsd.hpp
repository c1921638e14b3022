#pragma once

#include "otacomm/delta_mod.hpp"
#include "otacomm/waveform.hpp"

#include <optional>

namespace otacomm {

/// Adaptive (continuously variable slope) delta modulator configuration.
/// The linear DM core is extended with a control path that rectifies the
/// integrator output's symbol-rate ripple, low-pass filters it, and maps
/// the result onto gm3 through an affine law clamped to [gm_min, gm_max].
struct CvsdConfig {
    DmConfig base;    // core modulator; base.gm3 is the initial transconductance
    double gm_min;    // A/V
    double gm_max;    // A/V
    double ctrl_gain; // (A/V) per volt of control signal
    double lpf_fc;    // Hz, control-path low-pass cutoff

    /// ctrl_gain defaults to the value at which sustained overload (an
    /// unbroken run of same-sign symbols) drives gm3 from gm_min up to
    /// 0.9*gm_max within 20 symbol periods. lpf_fc defaults to fs/50.
    static CvsdConfig make(const DmConfig& base, double gm_min, double gm_max,
                           std::optional<double> ctrl_gain = std::nullopt,
                           std::optional<double> lpf_fc = std::nullopt);
};

/// The default ctrl_gain sizing rule, exposed for inspection.
double cvsd_default_ctrl_gain(const DmConfig& base, double gm_min, double gm_max, double lpf_fc);

struct CvsdOutput {
    BitStream bits;
    Waveform staircase;  // integrator output
    Waveform gm_trace;   // instantaneous gm3, A/V
    Waveform step_trace; // instantaneous step size gm3*V*Ts/(2*C1), volts
};

/// Closed-loop adaptive encoder. Overload (runs of same-sign symbols)
/// raises the control voltage and with it the step size; granular
/// operation (alternating symbols) lets it decay.
CvsdOutput cvsd_encode(const CvsdConfig& cfg, const Waveform& input);

/// Receiver-side replica: the control path depends only on the bit
/// sequence, so replaying the bits through the identical loop reproduces
/// the encoder staircase exactly.
Waveform cvsd_decode(const BitStream& bits, const CvsdConfig& cfg);

} // namespace otacomm
