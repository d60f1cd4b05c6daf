#pragma once

#include <stdexcept>
#include <string>

namespace co2bench {

// File/schema problems: bad CSV header, missing channel, length mismatch.
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid parameter sets or inconsistent run configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Arithmetic preconditions violated (zero variance, degenerate scale, ...).
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Regression problem not solvable as posed (rank-deficient regressor).
struct IdentifiabilityError : std::runtime_error {
    explicit IdentifiabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace co2bench
