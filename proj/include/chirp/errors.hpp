#pragma once

#include <stdexcept>
#include <string>

namespace chirp {

/// Invalid domain input: wall cells, shape mismatches, bad configuration.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A cross-MDP quantity is undefined (policy not executable in the target MDP).
struct CalculabilityError : std::runtime_error {
    explicit CalculabilityError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-convergence, degenerate denominators, non-finite values.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace chirp
