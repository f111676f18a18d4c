#pragma once

#include <stdexcept>
#include <string>

namespace inner {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-facing input: malformed files, out-of-range values, inconsistent
// configuration. Maps to CLI exit code 1.
struct ValidationError : Error {
    using Error::Error;
};

// Inconsistent configuration passed to a builder or trainer.
struct ConfigError : ValidationError {
    using ValidationError::ValidationError;
};

// API misuse: mismatched shapes, traces from a different network, mixed
// thresholds in an aggregate.
struct ContractError : ValidationError {
    using ValidationError::ValidationError;
};

// Filesystem problems. Maps to CLI exit code 2.
struct IoError : Error {
    using Error::Error;
};

// Numeric failures: divergence, degenerate data, unreachable calibration
// targets. Maps to CLI exit code 3.
struct NumericError : Error {
    using Error::Error;
};

// Training produced a non-finite loss.
struct DivergenceError : NumericError {
    using NumericError::NumericError;
};

// Bisection could not reach the requested signal-to-noise ratio.
struct CalibrationError : NumericError {
    using NumericError::NumericError;
};

// A metric is undefined for the given input (e.g. single-class labels).
struct UndefinedMetricError : NumericError {
    using NumericError::NumericError;
};

// Input has no usable spread (constant scores, zero variance).
struct DegenerateDataError : NumericError {
    using NumericError::NumericError;
};

}  // namespace inner
