#pragma once

#include <stdexcept>
#include <string>

namespace gatedpore {

/// Raised for inputs that violate a documented parameter contract.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a computation cannot produce a meaningful number
/// (too few retained cycles, degenerate regression, size caps).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gatedpore
