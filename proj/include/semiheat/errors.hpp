#pragma once

#include <stdexcept>
#include <string>

namespace semiheat {

/// Solver produced non-finite values; the run must be abandoned.
class SolverAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exponent outside the range where an estimate is known to hold.
class RegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A checker precondition that can be stated numerically (e.g. a minimal A).
class PreconditionFailure : public std::invalid_argument {
public:
    PreconditionFailure(const std::string& what, double required)
        : std::invalid_argument(what), required_(required) {}

    double required() const noexcept { return required_; }

private:
    double required_;
};

}  // namespace semiheat
