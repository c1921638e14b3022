#include "otacomm/compander.hpp"

#include "otacomm/errors.hpp"
#include "otacomm/waveform.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace otacomm;

namespace {

CompressorCircuit table1_row(int row) {
    switch (row) {
        case 1: return {OtaParams{10e-3}, DiodeParams{28.5e-6, 2.0, 300.0}};
        case 2: return {OtaParams{9e-3}, DiodeParams{39.5e-6, 2.0, 300.0}};
        default: return {OtaParams{8e-3}, DiodeParams{39.5e-6, 2.0, 300.0}};
    }
}

} // namespace

TEST_CASE("mu-law curve endpoints and the published half-scale values") {
    const MuLawParams mu255{255.0};
    CHECK(mu_compress(mu255, 0.0) == 0.0);
    CHECK(mu_compress(mu255, 1.0) == 1.0);
    // Frozen from an independent long-double evaluation of ln(128.5)/ln(256).
    const double expected255 =
        static_cast<double>(std::log1p(255.0L * 0.5L) / std::log1p(255.0L));
    CHECK(expected255 == doctest::Approx(0.8757030686492349).epsilon(1e-12));
    CHECK(mu_compress(mu255, 0.5) == doctest::Approx(expected255).epsilon(1e-12));

    CHECK_THROWS_AS(mu_compress(mu255, -0.1), ValidationError);
    CHECK_THROWS_AS(mu_compress(mu255, 1.1), ValidationError);
    CHECK_THROWS_AS(MuLawParams{0.0}, ValidationError);
    CHECK_THROWS_AS(MuLawParams{-5.0}, ValidationError);
}

TEST_CASE("mu-law expander inverts the compressor") {
    const MuLawParams p{255.0};
    CHECK(mu_expand(p, 0.0) == 0.0);
    CHECK(mu_expand(p, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

    std::mt19937 rng(61);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double v = unit(rng);
        CHECK(mu_expand(p, mu_compress(p, v)) == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("mu-law curve is concave with the analytic gain at the origin") {
    const MuLawParams p{350.0};
    std::mt19937 rng(67);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        double a = unit(rng), b = unit(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        const double mid = mu_compress(p, 0.5 * (a + b));
        const double chord = 0.5 * (mu_compress(p, a) + mu_compress(p, b));
        CHECK(mid > chord);
    }

    const double h = 1e-7;
    const double slope = (mu_compress(p, h) - mu_compress(p, 0.0)) / h;
    CHECK(slope == doctest::Approx(p.mu / std::log1p(p.mu)).epsilon(1e-3));
    CHECK(slope > 1.0);
}

TEST_CASE("compressor circuit solves the diode node") {
    const CompressorCircuit c = table1_row(1);
    CHECK(compressor_circuit_dc(c, 0.0) == 0.0);

    // 1 V input pushes 10 mA into the diode; frozen from the bisection oracle.
    const double expected = oracle::diode_node_bisect(28.5e-6, 2.0, 300.0, 10e-3);
    CHECK(expected == doctest::Approx(0.30364472854575814).epsilon(1e-9));
    CHECK(compressor_circuit_dc(c, 1.0) == doctest::Approx(expected).epsilon(1e-9));

    CHECK_THROWS_AS(compressor_circuit_dc(c, -0.1), ValidationError);
}

TEST_CASE("compressor sweep over the published ramp is concave and monotone") {
    const CompressorCircuit c = table1_row(1);
    double prev = -1.0;
    double prev_inc = 1e9;
    const int n = 256;
    for (int i = 0; i < n; ++i) {
        const double v = 2.5 * i / (n - 1);
        const double out = compressor_circuit_dc(c, v);
        CHECK(out > prev);
        if (i > 0) {
            const double inc = out - prev;
            CHECK(inc < prev_inc); // strictly shrinking increments: concave
            prev_inc = inc;
        }
        prev = out;
    }
}

TEST_CASE("node solve agrees with the closed form over the full input range") {
    const CompressorCircuit c = table1_row(1);
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> volt(0.0, 2.5);
    const double nvt = c.diode.n * c.diode.thermal_voltage();
    for (int trial = 0; trial < 1000; ++trial) {
        const double v = volt(rng);
        const double closed = nvt * std::log1p(v * c.ota.gm / c.diode.Is);
        CHECK(std::fabs(compressor_circuit_dc(c, v) - closed) <= 1e-9);
    }
}

TEST_CASE("effective mu reproduces every published table row within 2%") {
    const double printed[] = {350.0, 230.0, 204.0};
    const double exact[] = {350.8771929824561, 227.84810126582278, 202.53164556962028};
    for (int row = 1; row <= 3; ++row) {
        const double mu = compressor_effective_mu(table1_row(row));
        CHECK(mu == doctest::Approx(exact[row - 1]).epsilon(1e-12));
        CHECK(std::fabs(mu - printed[row - 1]) / printed[row - 1] < 0.02);
    }
}

TEST_CASE("normalized compressor matches the ideal curve") {
    for (int row = 1; row <= 3; ++row) {
        const CompressorCircuit c = table1_row(row);
        const MuLawParams ideal{compressor_effective_mu(c)};
        CHECK(compressor_normalized(c, 0.0) == 0.0);
        CHECK(compressor_normalized(c, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
        for (int i = 0; i <= 100; ++i) {
            const double v = i / 100.0;
            CHECK(std::fabs(compressor_normalized(c, v) - mu_compress(ideal, v)) <= 1e-6);
        }
    }

    // Frozen half-scale value for the first table row.
    const CompressorCircuit c1 = table1_row(1);
    CHECK(compressor_normalized(c1, 0.5) == doctest::Approx(0.8822657202353372).epsilon(1e-9));

    // The normalization mode guards its hard-coded 19.23 constant.
    const CompressorCircuit wrong_n{OtaParams{10e-3}, DiodeParams{28.5e-6, 1.0, 300.0}};
    CHECK_THROWS_AS(compressor_normalized(wrong_n, 0.5), ValidationError);
    const CompressorCircuit wrong_t{OtaParams{10e-3}, DiodeParams{28.5e-6, 2.0, 330.0}};
    CHECK_THROWS_AS(compressor_normalized(wrong_t, 0.5), ValidationError);
    CHECK_THROWS_AS(compressor_normalized(c1, 1.5), ValidationError);
}

TEST_CASE("x_scale ties the published 19.23 constant to ln(1 + mu)") {
    const CompressorCircuit c = table1_row(1);
    const double mu = compressor_effective_mu(c);
    // x * 19.23 = ln(1 + mu) holds within the 0.5% guard band.
    CHECK(c.x_scale * 19.23 == doctest::Approx(std::log1p(mu)).epsilon(0.005));
}

TEST_CASE("expander circuit applies the inverse exponential") {
    const DiodeParams d{28.5e-6, 1.0, 300.0};
    const ExpanderCircuit e{10e-3, 10e-3, 10e-3, d};
    CHECK(expander_circuit_dc(e, 0.0) == 0.0);
    CHECK(expander_effective_mu(e) == doctest::Approx(350.8771929824561).epsilon(1e-12));

    // Frozen from the composed node-equation oracle at v_in = 0.1 V.
    const double expected = oracle::expander_dc(10e-3, 10e-3, 10e-3, 28.5e-6, 1.0, 300.0, 0.1);
    CHECK(expected == doctest::Approx(0.13268837215946525).epsilon(1e-9));
    CHECK(expander_circuit_dc(e, 0.1) == doctest::Approx(expected).epsilon(1e-9));

    // Overflow guard: the exponent cap rejects unphysical inputs.
    CHECK_THROWS_AS(expander_circuit_dc(e, 2.0), ValidationError);
    CHECK_THROWS_AS(expander_circuit_dc(e, -0.1), ValidationError);
}

TEST_CASE("expander transfer is convex and monotone") {
    const DiodeParams d{28.5e-6, 1.0, 300.0};
    const ExpanderCircuit e{10e-3, 10e-3, 10e-3, d};
    double prev = -1.0;
    double prev_inc = 0.0;
    for (int i = 0; i <= 128; ++i) {
        const double v = 0.18 * i / 128.0;
        const double out = expander_circuit_dc(e, v);
        CHECK(out > prev);
        if (i > 0) {
            const double inc = out - prev;
            CHECK(inc > prev_inc); // growing increments: convex
            prev_inc = inc;
        }
        prev = out;
    }
}

TEST_CASE("matched compander round trip recovers the ramp") {
    const CompressorCircuit c = table1_row(1);
    const ExpanderCircuit e = matched_expander(c);
    const Waveform input = ramp(0.0, 2.5, 1e-6, 1e-3);
    const Waveform out = compand_roundtrip(c, e, input);
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (std::fabs(input[i]) < 0.05 * 2.5) continue;
        CHECK(std::fabs(out[i] - input[i]) / std::fabs(input[i]) <= 0.01);
    }

    const Waveform zeros = Waveform::zeros(1e-6, 32);
    const Waveform zout = compand_roundtrip(c, e, zeros);
    for (std::size_t i = 0; i < zout.size(); ++i) CHECK(zout[i] == 0.0);
}

TEST_CASE("round trip preserves a small bipolar sine") {
    const CompressorCircuit c = table1_row(1);
    const ExpanderCircuit e = matched_expander(c);
    const Waveform input = sine(0.05, 1e3, 0.0, 1e-6, 4e-3);
    const Waveform out = compand_roundtrip(c, e, input);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        sxy += input[i] * out[i];
        sxx += input[i] * input[i];
        syy += out[i] * out[i];
    }
    CHECK(sxy / std::sqrt(sxx * syy) >= 0.999);
}

TEST_CASE("compander circuits accept only the 1..50 mA/V tuning range") {
    const DiodeParams d{28.5e-6, 2.0, 300.0};
    CHECK_NOTHROW(CompressorCircuit(OtaParams{1e-3}, d));
    CHECK_NOTHROW(CompressorCircuit(OtaParams{50e-3}, d));
    CHECK_THROWS_AS(CompressorCircuit(OtaParams{0.5e-3}, d), ValidationError);
    CHECK_THROWS_AS(CompressorCircuit(OtaParams{60e-3}, d), ValidationError);
    CHECK_THROWS_AS(ExpanderCircuit(10e-3, 0.9e-3, 10e-3, d), ValidationError);
    CHECK_THROWS_AS(ExpanderCircuit(10e-3, 10e-3, 55e-3, d), ValidationError);
}

TEST_CASE("mismatched compander pairs are rejected") {
    const CompressorCircuit c = table1_row(1);
    const Waveform input = ramp(0.0, 2.5, 1e-6, 1e-3);

    // 5% off in effective mu.
    const ExpanderCircuit mu_off{10e-3, 10e-3, 10e-3, DiodeParams{30e-6, 2.0, 300.0}};
    CHECK_THROWS_AS(compand_roundtrip(c, mu_off, input), ValidationError);

    // Right mu, wrong exponent scale (n mismatch).
    const ExpanderCircuit n_off{10e-3, 10e-3, 10e-3, DiodeParams{28.5e-6, 1.0, 300.0}};
    CHECK_THROWS_AS(compand_roundtrip(c, n_off, input), ValidationError);

    // Wrong divider ratio gm1/gm3.
    const ExpanderCircuit div_off{10e-3, 10e-3, 12e-3, DiodeParams{28.5e-6, 2.0, 300.0}};
    CHECK_THROWS_AS(compand_roundtrip(c, div_off, input), ValidationError);
}
