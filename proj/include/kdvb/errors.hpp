#pragma once

#include <stdexcept>
#include <string>

namespace kdvb {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejected input: wrong dimension, non-positive component, bad parameter.
/// Maps to CLI exit code 2.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Numerical failure during a run: lost positivity, failed lift, no period.
/// Maps to CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// File I/O failure. Maps to CLI exit code 4.
class IoError : public Error {
public:
    using Error::Error;
};

/// An integration step produced a non-positive component (step too large).
class PositivityLost : public NumericalError {
public:
    PositivityLost(std::size_t index, double value, double time)
        : NumericalError("positivity lost at component " + std::to_string(index + 1) +
                         " (value " + std::to_string(value) + ", t = " + std::to_string(time) + ")"),
          index(index), value(value), time(time) {}

    std::size_t index;
    double value;
    double time;
};

/// The initial state is (numerically) an equilibrium of the fast field.
class FixedPointError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// No near-return of the trajectory was found within the search horizon.
class NoReturnFound : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The lifting Jacobian is singular for every tried fixed-index set.
class SingularJacobian : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Newton iteration for lifting did not converge within the budget.
class MaxItersExceeded : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The damped Newton step could not stay in the positive orthant.
class LeftPositiveOrthant : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace kdvb
