#pragma once

#include <stdexcept>
#include <string>

namespace esb3 {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A requested moment (or series term) does not exist because c <= r.
class MomentDoesNotExist : public DomainError {
public:
    using DomainError::DomainError;
};

/// Numerical routine failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bracketed root finder was handed an interval without a sign change.
class NoBracket : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fewer observations than the fitter accepts.
class SmallSample : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Data cannot identify the model (constant sample, all points on one side, ...).
class DegenerateData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unreadable or malformed input file. `line` is 1-based, 0 when not tied to a line.
class InputError : public std::runtime_error {
public:
    InputError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace esb3
