#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace minphase {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a total function (e.g. u outside the
/// visible region).
class DomainError : public Error {
public:
    using Error::Error;
};

struct SpecIssue {
    /// Band index the issue refers to, or -1 for spec-level fields.
    int band_index;
    std::string reason;
};

class SpecError : public Error {
public:
    explicit SpecError(std::vector<SpecIssue> issues);

    [[nodiscard]] const std::vector<SpecIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<SpecIssue> issues_;
};

/// The requested pattern cannot be met by any finite design (zero ripple,
/// zero-width transition, ...).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double last_delta, std::vector<double> extremal_u)
        : Error(what), last_delta_(last_delta), extremal_u_(std::move(extremal_u)) {}

    [[nodiscard]] double last_delta() const noexcept { return last_delta_; }
    [[nodiscard]] const std::vector<double>& extremal_u() const noexcept { return extremal_u_; }

private:
    double last_delta_;
    std::vector<double> extremal_u_;
};

/// Cholesky pivot at or below the floor: G + γI is not positive definite.
class FactorizationError : public Error {
public:
    FactorizationError(const std::string& what, std::size_t pivot_row)
        : Error(what), pivot_row_(pivot_row) {}

    [[nodiscard]] std::size_t pivot_row() const noexcept { return pivot_row_; }

private:
    std::size_t pivot_row_;
};

}  // namespace minphase
