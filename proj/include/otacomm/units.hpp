#pragma once

#include <string>

namespace otacomm {

/// Parses a config scalar with an optional SI multiplier prefix and unit
/// name: "10MHz" -> 1e7, "2pF" -> 2e-12, "100uA/V" -> 1e-4, "0.25" -> 0.25.
/// Multipliers are exactly {T,G,M,k,m,u,n,p,f}; recognized unit names
/// (Hz, A/V, V, A, F, s, K) are checked and stripped; bare numbers are SI
/// base units. Throws ConfigError on anything else.
double parse_si_value(const std::string& text);

} // namespace otacomm
