#pragma once

#include <stdexcept>
#include <string>

namespace divest {

// Error taxonomy. The CLI maps these onto its exit codes.

/// Bad argument value: bandwidth outside (0,1], mismatched lengths, empty regions.
class ParameterError : public std::invalid_argument {
public:
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input outside the mathematical domain of an operation (non-finite points,
/// divergent integrals, zero reference density where it is needed).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A numerical procedure did not converge or produced a non-finite value.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or infeasible experiment configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace divest
