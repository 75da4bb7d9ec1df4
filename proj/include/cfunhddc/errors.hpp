#pragma once

#include <stdexcept>

namespace cfunhddc {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration, domain or precondition violation.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Non-finite values, non-positive-definite matrices, solver breakdowns.
class NumericError : public Error {
public:
    using Error::Error;
};

// Curve smoothing failures (underdetermined or rank-deficient designs).
class SmoothingError : public Error {
public:
    using Error::Error;
};

// Malformed input files.
class IngestError : public Error {
public:
    using Error::Error;
};

// Evaluation metric preconditions (shape mismatch, empty reference set).
class MetricError : public Error {
public:
    using Error::Error;
};

// A single ECM run became degenerate (e.g. an emptied cluster); the restart
// driver treats this as a failed restart, not a fatal condition.
class RestartFailure : public Error {
public:
    using Error::Error;
};

// Model selection could not produce any usable candidate.
class SelectionError : public Error {
public:
    using Error::Error;
};

// Unsatisfiable simulation specification.
class SimulationError : public Error {
public:
    using Error::Error;
};

} // namespace cfunhddc
