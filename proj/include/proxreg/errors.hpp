#pragma once

#include <stdexcept>
#include <string>

namespace proxreg {

/// Operands live in different ambient dimensions.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An object was constructed from data that violates its invariants
/// (non-monotone matrix, inconsistent affine system, negative radius, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative oracle ran out of budget before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A convergence-rate hypothesis does not hold for the requested parameters.
class AssumptionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace proxreg
