#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ovna {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument to an operation (non-finite input, zero-power vector, ...).
class InvalidInputError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or infeasible configuration (sample rate, delay plan, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A model produced a non-finite value or an iteration failed to converge.
class InternalError : public Error {
public:
    using Error::Error;
};

/// Phase unwrapping hit a jump larger than pi; carries the sample index.
class PhaseUnwrapError : public Error {
public:
    PhaseUnwrapError(const std::string& msg, std::size_t index)
        : Error(msg), sample_index(index) {}
    std::size_t sample_index;
};

/// Transfer-matrix assembly is missing a channel.
class AssemblyError : public Error {
public:
    using Error::Error;
};

/// Calibration reference is unusable (zero response at the calibration point).
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// A metric is undefined for the given matrix (all-zero input and similar).
class MetricError : public Error {
public:
    using Error::Error;
};

}  // namespace ovna
