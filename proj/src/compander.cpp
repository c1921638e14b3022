#include "otacomm/compander.hpp"

#include "otacomm/errors.hpp"

#include <cmath>
#include <sstream>

namespace otacomm {

namespace {

constexpr double kNominalHalfInvVt = 19.23; // 1/V, q/(2KT) as printed for 300 K
constexpr double kExponentCap = 60.0;

void require_unit_range(double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw ValidationError(std::string(what) + " must lie in [0, 1]");
    }
}

void require_compander_gm(double gm, const char* what) {
    if (!gm_within_compander_range(gm)) {
        std::ostringstream msg;
        msg << what << " = " << gm << " A/V outside the accepted 1e-3..50e-3 tuning range";
        throw ValidationError(msg.str());
    }
}

} // namespace

MuLawParams::MuLawParams(double mu_) : mu(mu_), D(0.0) {
    if (!std::isfinite(mu) || mu <= 0.0) {
        throw ValidationError("MuLawParams mu must be > 0");
    }
    D = std::log1p(mu);
}

double mu_compress(const MuLawParams& p, double v) {
    require_unit_range(v, "mu_compress input");
    return std::log1p(p.mu * v) / p.D;
}

double mu_expand(const MuLawParams& p, double w) {
    require_unit_range(w, "mu_expand input");
    return std::expm1(p.D * w) / p.mu;
}

CompressorCircuit::CompressorCircuit(OtaParams ota_, DiodeParams diode_)
    : ota(ota_), diode(diode_), x_scale(0.0) {
    require_compander_gm(ota.gm, "CompressorCircuit gm");
    x_scale = std::log1p(ota.gm / diode.Is) * diode.n * diode.thermal_voltage();
}

double compressor_effective_mu(const CompressorCircuit& c) {
    return c.ota.gm / c.diode.Is;
}

double compressor_circuit_dc(const CompressorCircuit& c, double v_in) {
    if (!std::isfinite(v_in) || v_in < 0.0) {
        throw ValidationError("compressor_circuit_dc v_in must be >= 0");
    }
    return solve_diode_node(c.diode, c.ota.gm * v_in);
}

double compressor_normalized(const CompressorCircuit& c, double v_in) {
    require_unit_range(v_in, "compressor_normalized input");
    const double inv_nvt = kElectronCharge / (c.diode.n * kBoltzmann * c.diode.T);
    if (std::fabs(inv_nvt - kNominalHalfInvVt) > 0.005 * kNominalHalfInvVt) {
        std::ostringstream msg;
        msg << "compressor_normalized requires q/(nKT) within 0.5% of " << kNominalHalfInvVt
            << " 1/V, got " << inv_nvt << " (n = " << c.diode.n << ", T = " << c.diode.T << " K)";
        throw ValidationError(msg.str());
    }
    return compressor_circuit_dc(c, v_in) / c.x_scale;
}

ExpanderCircuit::ExpanderCircuit(double gm1_, double gm2_, double gm3_, DiodeParams diode_)
    : gm1(gm1_), gm2(gm2_), gm3(gm3_), diode(diode_) {
    OtaParams{gm1};
    OtaParams{gm2};
    OtaParams{gm3};
    require_compander_gm(gm1, "ExpanderCircuit gm1");
    require_compander_gm(gm2, "ExpanderCircuit gm2");
    require_compander_gm(gm3, "ExpanderCircuit gm3");
}

double expander_effective_mu(const ExpanderCircuit& e) {
    return e.gm2 / e.diode.Is;
}

double expander_circuit_dc(const ExpanderCircuit& e, double v_in) {
    if (!std::isfinite(v_in) || v_in < 0.0) {
        throw ValidationError("expander_circuit_dc v_in must be >= 0");
    }
    const double exponent = (e.gm1 / e.gm3) * v_in / (e.diode.n * e.diode.thermal_voltage());
    if (exponent > kExponentCap) {
        std::ostringstream msg;
        msg << "expander_circuit_dc exponent " << exponent
            << " exceeds the overflow guard (unphysical operating point)";
        throw ValidationError(msg.str());
    }
    return e.diode.Is / e.gm2 * std::expm1(exponent);
}

ExpanderCircuit matched_expander(const CompressorCircuit& c) {
    return ExpanderCircuit(c.ota.gm, c.ota.gm, c.ota.gm, c.diode);
}

Waveform compand_roundtrip(const CompressorCircuit& c, const ExpanderCircuit& e,
                           const Waveform& input) {
    const double mu_c = compressor_effective_mu(c);
    const double mu_e = expander_effective_mu(e);
    if (std::fabs(mu_c - mu_e) > 0.01 * mu_c) {
        std::ostringstream msg;
        msg << "compander mismatch: compressor mu = " << mu_c << ", expander mu = " << mu_e
            << " (must agree within 1%)";
        throw ValidationError(msg.str());
    }
    // The expander exponent must undo the compressor's n*VT log scale.
    const double scale = (e.gm1 / e.gm3) * (c.diode.n * c.diode.thermal_voltage()) /
                         (e.diode.n * e.diode.thermal_voltage());
    if (std::fabs(scale - 1.0) > 0.01) {
        std::ostringstream msg;
        msg << "compander scale stages misaligned: exponent recovery factor " << scale
            << " (must be 1 within 1%)";
        throw ValidationError(msg.str());
    }

    std::vector<double> out(input.size());
    for (std::size_t i = 0; i < input.size(); ++i) {
        const double v = input[i];
        const double mag = expander_circuit_dc(e, compressor_circuit_dc(c, std::fabs(v)));
        out[i] = std::copysign(mag, v);
    }
    return Waveform(input.dt(), input.t0(), std::move(out));
}

} // namespace otacomm
