#pragma once

#include <stdexcept>
#include <string>

namespace typeamalg {

/// Raised when caller-supplied data violates a documented precondition.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string & what) : std::invalid_argument(what) {}
};

/// Raised when an operation is asked to work outside the class of inputs it supports
/// (for example a binary-only construction applied to a ternary language).
class Unsupported : public std::runtime_error {
public:
    explicit Unsupported(const std::string & what) : std::runtime_error(what) {}
};

/// Raised when an exhaustive search would exceed its configured budget.
class BudgetExceeded : public std::runtime_error {
public:
    explicit BudgetExceeded(const std::string & what) : std::runtime_error(what) {}
};

} // namespace typeamalg
