#pragma once

#include "otacomm/blocks.hpp"
#include "otacomm/waveform.hpp"

namespace otacomm {

/// Ideal mu-law curve parameter. D = ln(1 + mu) is recomputed from mu,
/// never stored independently.
struct MuLawParams {
    double mu;
    double D;

    explicit MuLawParams(double mu);
};

/// ln(1 + mu*v) / ln(1 + mu) on v in [0, 1]; monotone, concave,
/// fixed at 0 -> 0 and 1 -> 1.
double mu_compress(const MuLawParams& p, double v);

/// (exp(D*w) - 1) / mu on w in [0, 1]; the exact algebraic inverse of
/// mu_compress.
double mu_expand(const MuLawParams& p, double w);

/// OTA driving a grounded diode: the input transconductor pushes
/// gm*V_in into the diode node, whose voltage is the logarithmic
/// compressor output. Realizes mu = gm/Is.
struct CompressorCircuit {
    OtaParams ota;
    DiodeParams diode;
    double x_scale; // output divisor for the normalized mode, ln(1+mu)*n*VT

    CompressorCircuit(OtaParams ota, DiodeParams diode);
};

/// gm/Is, the curvature parameter this circuit realizes.
double compressor_effective_mu(const CompressorCircuit& c);

/// Node voltage for v_in >= 0: n*VT*ln(1 + v_in*gm/Is).
double compressor_circuit_dc(const CompressorCircuit& c, double v_in);

/// Circuit output divided by x_scale, mapping [0,1] volts onto [0,1].
/// Coincides with mu_compress at mu = gm/Is. Only valid where the derived
/// q/(n*K*T) sits within 0.5% of the nominal 19.23 1/V (n = 2, 300 K).
double compressor_normalized(const CompressorCircuit& c, double v_in);

/// Two-transconductor expander around a diode: V_i' = (gm1/gm3)*V_i at
/// the input divider node, and the output settles where gm2*V_0 equals
/// the diode current at V_i'. Realizes the inverse exponential with
/// mu = gm2/Is.
struct ExpanderCircuit {
    double gm1; // A/V
    double gm2; // A/V
    double gm3; // A/V
    DiodeParams diode;

    ExpanderCircuit(double gm1, double gm2, double gm3, DiodeParams diode);
};

double expander_effective_mu(const ExpanderCircuit& e);

/// (Is/gm2) * (exp((gm1/gm3)*v_in/(n*VT)) - 1) for v_in >= 0. Rejects
/// operating points whose exponent exceeds 60.
double expander_circuit_dc(const ExpanderCircuit& e, double v_in);

/// Expander whose parameters invert the given compressor exactly:
/// gm1 = gm3, matched n and T, gm2/Is = gm/Is.
ExpanderCircuit matched_expander(const CompressorCircuit& c);

/// Sample-wise compress-then-expand with sign-magnitude handling of
/// bipolar inputs. Requires the pair to be parameter-matched (effective
/// mu within 1%, same n and T, aligned exponent scale).
Waveform compand_roundtrip(const CompressorCircuit& c, const ExpanderCircuit& e,
                           const Waveform& input);

} // namespace otacomm
