#include "otacomm/units.hpp"

#include "otacomm/errors.hpp"

#include <array>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <string_view>

namespace otacomm {

namespace {

struct Prefix {
    char symbol;
    double factor;
};

constexpr std::array<Prefix, 9> kPrefixes{{
    {'T', 1e12},
    {'G', 1e9},
    {'M', 1e6},
    {'k', 1e3},
    {'m', 1e-3},
    {'u', 1e-6},
    {'n', 1e-9},
    {'p', 1e-12},
    {'f', 1e-15},
}};

// Longest first so "A/V" wins over "V".
constexpr std::array<std::string_view, 7> kUnits{"A/V", "Hz", "V", "A", "F", "s", "K"};

} // namespace

double parse_si_value(const std::string& text) {
    if (text.empty()) throw ConfigError("empty value");

    errno = 0;
    char* end = nullptr;
    const double magnitude = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || errno == ERANGE || !std::isfinite(magnitude)) {
        throw ConfigError("cannot parse number in '" + text + "'");
    }

    std::string_view suffix(end);
    for (const auto& unit : kUnits) {
        if (suffix.size() >= unit.size() &&
            suffix.substr(suffix.size() - unit.size()) == unit) {
            suffix.remove_suffix(unit.size());
            break;
        }
    }
    if (suffix.empty()) return magnitude;
    if (suffix.size() == 1) {
        for (const auto& p : kPrefixes) {
            if (suffix[0] == p.symbol) return magnitude * p.factor;
        }
    }
    throw ConfigError("unrecognized unit suffix '" + std::string(end) + "' in '" + text + "'");
}

} // namespace otacomm
