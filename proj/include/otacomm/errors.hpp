#pragma once

#include <stdexcept>
#include <string>

namespace otacomm {

/// Bad parameter or physical invariant violation (finite checks, ranges).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// The diode node equation has no solution for the requested current.
struct NoSolutionError : std::domain_error {
    using std::domain_error::domain_error;
};

/// An iterative solver hit its iteration cap. Indicates a solver bug for
/// inputs that pass the preconditions.
struct NonConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed experiment configuration (unparseable file, unknown key).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A simulation failed mid-run (overflow guard, inconsistent state).
struct SimulationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem failure while writing experiment outputs.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace otacomm
