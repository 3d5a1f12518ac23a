// Exception types used across the overlay routing engine. Each maps to one
// failure mode of a public operation; catching the base smart::Error is
// enough for CLI-level handling.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace smart {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimensionError : public Error {
public:
    using Error::Error;
};

// Fixed-point solver ran out of iterations; carries the last iterate and the
// max-norm residual so callers can report diagnostics.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, std::vector<double> last_iterate,
                     double residual, std::size_t iterations)
        : Error(msg),
          last_iterate(std::move(last_iterate)),
          residual(residual),
          iterations(iterations) {}

    std::vector<double> last_iterate;
    double residual = 0.0;
    std::size_t iterations = 0;
};

class DegenerateDistributionError : public Error {
public:
    using Error::Error;
};

class DegenerateRowError : public Error {
public:
    using Error::Error;
};

class InvalidPairError : public Error {
public:
    using Error::Error;
};

// Header codec failures.
class HeaderFormatError : public Error {      // bad magic or version
public:
    using Error::Error;
};

class HeaderTruncatedError : public Error {   // buffer shorter than declared
public:
    using Error::Error;
};

class HeaderCorruptError : public Error {     // internally inconsistent fields
public:
    using Error::Error;
};

class IncompleteProbeError : public Error {   // unset or inconsistent timestamps
public:
    using Error::Error;
};

class InvalidMeasurementError : public Error {
public:
    using Error::Error;
};

class ThresholdUninitializedError : public Error {
public:
    using Error::Error;
};

class InvalidRoundError : public Error {
public:
    using Error::Error;
};

class NoPathError : public Error {
public:
    using Error::Error;
};

class BudgetViolationError : public Error {
public:
    using Error::Error;
};

class InvalidInputError : public Error {
public:
    using Error::Error;
};

// Malformed file content; line is 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line(line) {}

    std::size_t line = 0;
};

// Bad configuration, unknown names, missing inputs.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace smart
