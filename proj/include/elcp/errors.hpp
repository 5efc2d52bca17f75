#pragma once

#include <stdexcept>
#include <string>

namespace elcp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or size of an argument does not match the model.
struct DimensionError : Error {
    using Error::Error;
};

// Too few observations for the requested estimate (k <= p, empty samples, ...).
struct InsufficientDataError : Error {
    using Error::Error;
};

// A matrix that must be positive definite failed to factor.
struct SingularDesignError : Error {
    using Error::Error;
};

// Multiplier leaves the domain of the empirical log-likelihood.
struct InfeasibleMultiplierError : Error {
    using Error::Error;
};

// A score segment is identically zero while the constraint is not.
struct DegenerateSegmentError : Error {
    using Error::Error;
};

// A quantity that is nonnegative in exact arithmetic came out negative
// beyond the rounding tolerance.
struct NumericalInconsistencyError : Error {
    using Error::Error;
};

struct InsufficientReplicatesError : Error {
    using Error::Error;
};

// Malformed dataset file (CSV); message carries the offending line.
struct DataFormatError : Error {
    using Error::Error;
};

// Malformed experiment config (unknown or missing keys, bad values).
struct ConfigError : Error {
    using Error::Error;
};

// Operation not available for the given error law.
struct UnsupportedLawError : Error {
    using Error::Error;
};

}  // namespace elcp
