#pragma once

#include <stdexcept>
#include <string>

namespace switchsim {

/// Model construction or consistency failure (bad pmf, closure violation, ...).
struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A requested parametrization cannot be realized (e.g. target mean out of range).
struct InvalidTargetError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Geometry preconditions violated: nu off the boundary, degenerate region,
/// unsupported dimension for brute-force construction.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative numerical procedure failed to converge or certify.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Experiment configuration problems (missing keys, bad values, unknown suite).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace switchsim
