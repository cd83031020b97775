#pragma once

#include <stdexcept>
#include <string>

namespace dipg {

// Invalid configuration or protocol violation; CLI maps this to exit code 2.
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Numerical abort (divergence, non-finite objective); CLI exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dipg
