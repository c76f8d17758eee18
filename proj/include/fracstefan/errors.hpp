#pragma once

#include <stdexcept>
#include <string>

namespace fracstefan {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative evaluation ran out of its term or iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial_sum, double last_term, int iterations)
        : std::runtime_error(what), partial_sum_(partial_sum), last_term_(last_term), iterations_(iterations) {}

    double partial_sum() const noexcept { return partial_sum_; }
    double last_term() const noexcept { return last_term_; }
    int iterations() const noexcept { return iterations_; }

private:
    double partial_sum_;
    double last_term_;
    int iterations_;
};

/// Base for failures of the front-coefficient root finder.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lo_(lo), hi_(hi) {}

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }

private:
    double lo_;
    double hi_;
};

/// The fixed-point map does not cross the identity inside the bracket
/// (or crosses it more than once on the coarse scan).
class BracketingError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Iteration cap reached before the residual tolerance was met.
class RootNotConvergedError : public SolverError {
public:
    RootNotConvergedError(const std::string& what, double lo, double hi, double best, double best_residual)
        : SolverError(what, lo, hi), best_(best), best_residual_(best_residual) {}

    double best() const noexcept { return best_; }
    double best_residual() const noexcept { return best_residual_; }

private:
    double best_;
    double best_residual_;
};

}  // namespace fracstefan
