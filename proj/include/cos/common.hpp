#pragma once

#include <stdexcept>
#include <string>

namespace cos {

// Error taxonomy shared by every module. All of these derive from
// std::runtime_error so callers that do not care about the category can
// still catch one type.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor/operand shapes do not line up.
struct DimensionError : Error {
    explicit DimensionError(const std::string& msg) : Error(msg) {}
};

// Input outside the mathematical domain of an operation (log of a
// non-positive value, a point on or outside the unit ball, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// API misuse: backward on a non-scalar, stepping a finished episode,
// quantizing against an empty codebook.
struct ContractError : Error {
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

// Invalid configuration value.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Training produced a NaN gradient or loss; carries the offending term.
struct DivergenceError : Error {
    explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

}  // namespace cos
