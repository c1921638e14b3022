#pragma once

#include "otacomm/waveform.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace otacomm {

/// Magnitude statistics of the nonzero staircase steps measured across
/// symbol boundaries, acquisition interval excluded.
struct StepStats {
    double mean_step; // volts
    double min_step;  // volts
    double max_step;  // volts
    int count;
};

StepStats measure_steps(const Waveform& staircase, double fs);

/// True iff |input - staircase| exceeds 2*delta anywhere after the
/// acquisition interval (4 symbol periods at fs).
bool detect_slope_overload(const Waveform& input, const Waveform& staircase, double delta,
                           double fs);

struct TransferCurve {
    std::vector<std::pair<double, double>> points; // (v_in, v_out), v_in strictly increasing
};

/// Evaluates a static transfer function at n_points uniformly spaced
/// inputs spanning [v_min, v_max].
TransferCurve sweep_transfer(const std::function<double(double)>& system, double v_min,
                             double v_max, int n_points);

/// Midrise uniform quantizer: the input is clamped to +-full_scale and
/// mapped to the midpoint of its cell (no zero output level).
double uniform_quantize(double v, int levels, double full_scale);

/// 10*log10(signal power / error power). Pass fs > 0 to exclude the
/// acquisition interval (4 symbol periods); fs = 0 scores every sample.
/// A zero-error reconstruction returns +infinity.
double sqnr_db(const Waveform& signal, const Waveform& reconstructed, double fs = 0.0);

} // namespace otacomm
