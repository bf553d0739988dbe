#pragma once

#include <stdexcept>
#include <string>

namespace sardiff {

// Base of all library errors. The CLI maps subclasses onto exit codes.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values: temperature <= 0, timestep out of range, ...
struct ParameterError : Error {
    using Error::Error;
};

// Tensor rank or extent mismatch.
struct DimensionError : Error {
    using Error::Error;
};

// Data violates a contract (mask not one-hot, class index out of range,
// degenerate signal power).
struct ValidationError : Error {
    using Error::Error;
};

// Malformed container or manifest bytes.
struct FormatError : Error {
    using Error::Error;
};

// Filesystem failure.
struct IoError : Error {
    using Error::Error;
};

// Non-finite loss or gradients during training.
struct DivergenceError : Error {
    using Error::Error;
};

}  // namespace sardiff
