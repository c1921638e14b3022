#include "otacomm/metrics.hpp"

#include "otacomm/delta_mod.hpp"
#include "otacomm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace otacomm {

namespace {

std::size_t steps_per_symbol(double dt, double fs, const char* who) {
    if (!std::isfinite(fs) || fs <= 0.0) {
        throw ValidationError(std::string(who) + ": fs must be > 0");
    }
    const double steps = 1.0 / (fs * dt);
    const double rounded = std::round(steps);
    if (steps < 1.0 - 1e-9 || std::fabs(steps - rounded) > 1e-9 * steps) {
        std::ostringstream msg;
        msg << who << ": 1/fs must be a whole number of grid steps, got fs = " << fs
            << " Hz against dt = " << dt << " s";
        throw ValidationError(msg.str());
    }
    return static_cast<std::size_t>(rounded);
}

} // namespace

StepStats measure_steps(const Waveform& staircase, double fs) {
    const std::size_t m = steps_per_symbol(staircase.dt(), fs, "measure_steps");
    const std::size_t first = kAcquisitionSymbols;
    if (staircase.size() <= (first + 1) * m) {
        throw ValidationError("measure_steps staircase too short to cover a post-acquisition step");
    }

    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    int count = 0;
    for (std::size_t n = first; (n + 1) * m < staircase.size(); ++n) {
        const double step = std::fabs(staircase[(n + 1) * m] - staircase[n * m]);
        if (step == 0.0) continue;
        sum += step;
        lo = std::min(lo, step);
        hi = std::max(hi, step);
        ++count;
    }
    if (count == 0) {
        throw ValidationError("measure_steps found no nonzero steps after acquisition");
    }
    return StepStats{sum / count, lo, hi, count};
}

bool detect_slope_overload(const Waveform& input, const Waveform& staircase, double delta,
                           double fs) {
    if (!input.same_grid(staircase)) {
        throw ValidationError("detect_slope_overload waveforms must share one grid");
    }
    if (!std::isfinite(delta) || delta <= 0.0) {
        throw ValidationError("detect_slope_overload delta must be > 0");
    }
    const std::size_t m = steps_per_symbol(input.dt(), fs, "detect_slope_overload");
    const double bound = 2.0 * delta;
    for (std::size_t i = kAcquisitionSymbols * m; i < input.size(); ++i) {
        if (std::fabs(input[i] - staircase[i]) > bound) return true;
    }
    return false;
}

TransferCurve sweep_transfer(const std::function<double(double)>& system, double v_min,
                             double v_max, int n_points) {
    if (!std::isfinite(v_min) || !std::isfinite(v_max) || v_min >= v_max) {
        throw ValidationError("sweep_transfer requires v_min < v_max");
    }
    if (n_points < 2) throw ValidationError("sweep_transfer requires n_points >= 2");

    TransferCurve curve;
    curve.points.reserve(static_cast<std::size_t>(n_points));
    const double span = (v_max - v_min) / static_cast<double>(n_points - 1);
    for (int i = 0; i < n_points; ++i) {
        const double v = v_min + span * static_cast<double>(i);
        curve.points.emplace_back(v, system(v));
    }
    return curve;
}

double uniform_quantize(double v, int levels, double full_scale) {
    if (!std::isfinite(v)) throw ValidationError("uniform_quantize v must be finite");
    if (levels < 2) throw ValidationError("uniform_quantize levels must be >= 2");
    if (!std::isfinite(full_scale) || full_scale <= 0.0) {
        throw ValidationError("uniform_quantize full_scale must be > 0");
    }
    const double clamped = std::clamp(v, -full_scale, full_scale);
    const double cell = 2.0 * full_scale / static_cast<double>(levels);
    auto idx = static_cast<long long>(std::floor((clamped + full_scale) / cell));
    idx = std::clamp(idx, 0LL, static_cast<long long>(levels) - 1);
    return -full_scale + (static_cast<double>(idx) + 0.5) * cell;
}

double sqnr_db(const Waveform& signal, const Waveform& reconstructed, double fs) {
    if (!signal.same_grid(reconstructed)) {
        throw ValidationError("sqnr_db waveforms must share one grid");
    }
    std::size_t start = 0;
    if (fs > 0.0) {
        start = kAcquisitionSymbols * steps_per_symbol(signal.dt(), fs, "sqnr_db");
        if (start >= signal.size()) {
            throw ValidationError("sqnr_db window is empty after the acquisition interval");
        }
    }
    double p_signal = 0.0;
    double p_noise = 0.0;
    for (std::size_t i = start; i < signal.size(); ++i) {
        const double s = signal[i];
        const double e = s - reconstructed[i];
        p_signal += s * s;
        p_noise += e * e;
    }
    if (p_signal == 0.0) throw ValidationError("sqnr_db signal power is zero");
    if (p_noise == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(p_signal / p_noise);
}

} // namespace otacomm
