#pragma once

#include <stdexcept>
#include <string>

namespace itfh {

// Invalid scheme parameters, constellation sizes, CLI keys and the like.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Quadrature or series failed to reach the requested accuracy.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace itfh
