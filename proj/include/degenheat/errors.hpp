#pragma once

#include <stdexcept>
#include <string>

namespace degenheat {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (negative time, bad interval
/// order, grid too small, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// |p(t)| fell below the nonvanishing floor.
class DegenerateCoefficientError : public Error {
public:
    using Error::Error;
};

/// Kernel evaluation was requested with Re omega <= 0, where the Gaussian
/// no longer decays.
class DegenerateKernelError : public Error {
public:
    using Error::Error;
};

/// A solve touched a time where Re omega(t) is below the configured floor.
class DegenerateRegimeError : public Error {
public:
    using Error::Error;
};

/// A problem-spec file could not be parsed; the message carries the key path.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Two fields were compared on different grids.
class GridMismatchError : public Error {
public:
    using Error::Error;
};

/// The time-stepping reference solver failed (tridiagonal breakdown,
/// domain too small for the data).
class OracleError : public Error {
public:
    using Error::Error;
};

}  // namespace degenheat
