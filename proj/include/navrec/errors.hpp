#pragma once

#include <stdexcept>
#include <string>

namespace navrec {

// Common base so callers can catch everything thrown by this library at once.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape/size mismatches and unsupported geometries (e.g. non power-of-two FFT sizes).
struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// NaN/Inf encountered, iterative solver diverged or failed to converge.
struct NumericalError : Error {
    explicit NumericalError(const std::string& msg) : Error(msg) {}
};

// Input is structurally valid but unusable (all-zero data, rank-deficient basis, ...).
struct DegenerateInputError : Error {
    explicit DegenerateInputError(const std::string& msg) : Error(msg) {}
};

// Bad user-facing configuration values (negative sizes, incompatible periods, ...).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// File format violations and I/O failures.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace navrec
