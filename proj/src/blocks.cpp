#include "otacomm/blocks.hpp"

#include "otacomm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace otacomm {

namespace {

constexpr double kExponentClamp = 60.0;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        throw ValidationError(std::string(what) + " must be finite");
    }
}

} // namespace

OtaParams::OtaParams(double gm_) : gm(gm_) {
    require_finite(gm, "OtaParams gm");
    if (gm <= 0.0) {
        throw ValidationError("OtaParams gm must be > 0, got " + std::to_string(gm));
    }
}

bool gm_within_dm_range(double gm) noexcept {
    return gm >= 70e-6 && gm <= 120e-6;
}

bool gm_within_compander_range(double gm) noexcept {
    return gm >= 1e-3 && gm <= 50e-3;
}

DiodeParams::DiodeParams(double Is_, double n_, double T_) : Is(Is_), n(n_), T(T_) {
    require_finite(Is, "DiodeParams Is");
    require_finite(n, "DiodeParams n");
    require_finite(T, "DiodeParams T");
    if (Is <= 0.0) throw ValidationError("DiodeParams Is must be > 0");
    if (n < 1.0 || n > 2.0) throw ValidationError("DiodeParams n must lie in [1, 2]");
    if (T <= 0.0) throw ValidationError("DiodeParams T must be > 0");
}

double DiodeParams::thermal_voltage() const noexcept {
    return kBoltzmann * T / kElectronCharge;
}

double ota_current(const OtaParams& p, double v_plus, double v_minus) {
    require_finite(v_plus, "ota_current v_plus");
    require_finite(v_minus, "ota_current v_minus");
    return p.gm * (v_plus - v_minus);
}

double diode_current(const DiodeParams& d, double v) {
    require_finite(v, "diode_current v");
    const double x = std::clamp(v / (d.n * d.thermal_voltage()), -kExponentClamp, kExponentClamp);
    return d.Is * std::expm1(x);
}

double solve_diode_node(const DiodeParams& d, double i_in) {
    require_finite(i_in, "solve_diode_node i_in");
    if (i_in <= -d.Is) {
        std::ostringstream msg;
        msg << "no diode node voltage sinks " << i_in << " A (floor is -Is = " << -d.Is << " A)";
        throw NoSolutionError(msg.str());
    }
    return d.n * d.thermal_voltage() * std::log1p(i_in / d.Is);
}

double solve_diode_node_bisect(const DiodeParams& d, double i_in) {
    require_finite(i_in, "solve_diode_node_bisect i_in");
    if (i_in <= -d.Is) {
        throw NoSolutionError("no diode node voltage sinks the requested current");
    }
    const double tol = std::max(1e-15, 1e-12 * std::fabs(i_in));
    auto residual = [&](double v) { return diode_current(d, v) - i_in; };

    // Bracket the root by doubling outward from 0.
    double lo = 0.0;
    double hi = 0.0;
    if (i_in > 0.0) {
        hi = d.n * d.thermal_voltage();
        while (residual(hi) < 0.0) hi *= 2.0;
    } else if (i_in < 0.0) {
        lo = -d.n * d.thermal_voltage();
        while (residual(lo) > 0.0) lo *= 2.0;
    } else {
        return 0.0;
    }

    constexpr int kMaxIter = 500;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) {
            // Interval collapsed to adjacent doubles; take the better end.
            return std::fabs(residual(lo)) < std::fabs(residual(hi)) ? lo : hi;
        }
        const double r = residual(mid);
        if (std::fabs(r) <= tol) return mid;
        if (r < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw NonConvergenceError("solve_diode_node_bisect exceeded the iteration cap");
}

Waveform integrate_ota_c(const OtaParams& p, double C, const Waveform& input, double v_init) {
    require_finite(C, "integrate_ota_c C");
    require_finite(v_init, "integrate_ota_c v_init");
    if (C <= 0.0) throw ValidationError("integrate_ota_c C must be > 0");

    const double rate = p.gm / C;
    const double dt = input.dt();
    std::vector<double> out(input.size() + 1);
    out[0] = v_init;
    for (std::size_t i = 0; i < input.size(); ++i) {
        out[i + 1] = out[i] + rate * dt * input[i];
    }
    return Waveform(dt, input.t0(), std::move(out));
}

double two_level_quantize(const QuantizerParams& q, double v_in, double v_ref) {
    require_finite(v_in, "two_level_quantize v_in");
    require_finite(v_ref, "two_level_quantize v_ref");
    return v_in >= v_ref ? q.V : -q.V;
}

QuantizerParams::QuantizerParams(double V_) : V(V_) {
    require_finite(V, "QuantizerParams V");
    if (V <= 0.0) throw ValidationError("QuantizerParams V must be > 0");
}

Waveform sample_hold(const Waveform& input, double fs) {
    require_finite(fs, "sample_hold fs");
    if (fs <= 0.0) throw ValidationError("sample_hold fs must be > 0");
    const double steps_per_period = 1.0 / (fs * input.dt());
    const double rounded = std::round(steps_per_period);
    if (steps_per_period < 1.0 - 1e-9 ||
        std::fabs(steps_per_period - rounded) > 1e-9 * steps_per_period) {
        std::ostringstream msg;
        msg << "sample_hold: 1/fs must be a whole number of grid steps, got fs = " << fs
            << " Hz against dt = " << input.dt() << " s";
        throw ValidationError(msg.str());
    }
    const auto m = static_cast<std::size_t>(rounded);

    std::vector<double> out(input.size());
    double held = input[0];
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (i % m == 0) held = input[i];
        out[i] = held;
    }
    return Waveform(input.dt(), input.t0(), std::move(out));
}

Waveform rectify(const Waveform& input) {
    std::vector<double> out(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        out[i] = std::fabs(input[i]);
    }
    return Waveform(input.dt(), input.t0(), std::move(out));
}

Waveform lowpass_one_pole(const Waveform& input, double fc, double v_init) {
    require_finite(fc, "lowpass_one_pole fc");
    require_finite(v_init, "lowpass_one_pole v_init");
    if (fc <= 0.0 || fc >= 0.5 / input.dt()) {
        std::ostringstream msg;
        msg << "lowpass_one_pole fc must lie in (0, " << 0.5 / input.dt() << ") Hz, got " << fc;
        throw ValidationError(msg.str());
    }
    const double alpha = 1.0 - std::exp(-2.0 * M_PI * fc * input.dt());
    std::vector<double> out(input.size());
    double y = v_init;
    for (std::size_t i = 0; i < input.size(); ++i) {
        y += alpha * (input[i] - y);
        out[i] = y;
    }
    return Waveform(input.dt(), input.t0(), std::move(out));
}

} // namespace otacomm
