#pragma once

#include <stdexcept>
#include <string>

namespace gwlife {

/// Invalid model parameters or a malformed model specification.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The criticality of a model (ml against 1) cannot be decided numerically.
class IndeterminateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operation's precondition on the spectral case does not hold
/// (e.g. invariant vectors requested in the boundary case).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative method failed to meet its tolerance within its budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gwlife
