#pragma once

#include <stdexcept>
#include <string>

namespace rpvtest {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller passed data that violates a documented precondition.
class InputError : public Error {
public:
    using Error::Error;
};

/// Malformed CSV input. `row` is 1-based and counts the header line; 0 if unknown.
class FormatError : public InputError {
public:
    FormatError(const std::string& what, std::size_t row = 0)
        : InputError(row == 0 ? what : "row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// A group does not carry enough purchases to estimate what was asked for.
class DegenerateGroupError : public Error {
public:
    using Error::Error;
};

/// Pooled no-purchase proportion is 0 or 1, so the proportion z-statistic is undefined.
class DegenerateProportionError : public Error {
public:
    using Error::Error;
};

/// Constant input where a spread is required.
class DegenerateInputError : public InputError {
public:
    using InputError::InputError;
};

/// Parameters on the edge of the space (r in {0,1} or sigma2 == 0).
class BoundaryParamError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

/// Constrained solver ran out of iterations. Carries the last residuals seen.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double constraint_residual, double gradient_residual)
        : Error(what + " (constraint residual " + std::to_string(constraint_residual) +
                ", gradient residual " + std::to_string(gradient_residual) + ")"),
          constraint_residual_(constraint_residual),
          gradient_residual_(gradient_residual) {}

    double constraint_residual() const noexcept { return constraint_residual_; }
    double gradient_residual() const noexcept { return gradient_residual_; }

private:
    double constraint_residual_;
    double gradient_residual_;
};

}  // namespace rpvtest
