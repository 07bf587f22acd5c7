#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rqr {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quantum number or index outside the truncated space.
struct RangeError : Error {
    RangeError(const std::string& coordinate, long value, long limit)
        : Error("range error: " + coordinate + "=" + std::to_string(value) +
                " outside [0, " + std::to_string(limit) + "]"),
          coordinate(coordinate) {}
    std::string coordinate;
};

// Mismatched spaces, non-Hermitian input, malformed segments.
struct StructuralError : Error {
    using Error::Error;
};

// Degenerate detunings or zero rates.
struct SingularityError : Error {
    using Error::Error;
};

struct PreconditionError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    NumericalError(const std::string& what, std::size_t segment)
        : Error(what + " (segment " + std::to_string(segment) + ")"), segment(segment) {}
    std::size_t segment;
};

struct CompilationError : Error {
    CompilationError(const std::string& what, int j, int k, double residual)
        : Error(what + " at (j=" + std::to_string(j) + ", k=" + std::to_string(k) +
                "), residual " + std::to_string(residual)),
          j(j), k(k), residual(residual) {}
    int j;
    int k;
    double residual;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace rqr
