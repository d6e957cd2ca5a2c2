#pragma once

#include <stdexcept>
#include <string>

namespace sdd {

/// Raised when the spline moment matrix is numerically not positive
/// definite. Carries the index of the failing Cholesky pivot so callers
/// can report which basis element caused the breakdown.
class ConditioningError : public std::runtime_error {
public:
    ConditioningError(int pivot_index, const std::string& what)
        : std::runtime_error(what), pivot_index_(pivot_index) {}

    int pivot_index() const noexcept { return pivot_index_; }

private:
    int pivot_index_;
};

/// Raised for requests that are valid in principle but outside what this
/// implementation supports (e.g. tensor quadrature in high dimension).
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for file access and document format failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sdd
