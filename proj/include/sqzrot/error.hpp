#ifndef SQZROT_ERROR_HPP
#define SQZROT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sqzrot {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Adaptive truncation did not reach the requested tail tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A state expansion carries too much weight in its top shells.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Operator requested at a parameter value where it is undefined (sqrt(1 - eta^2) = 0).
class SingularParameterError : public Error {
public:
    using Error::Error;
};

/// Ladder application annihilated the state numerically.
class DegenerateStateError : public Error {
public:
    using Error::Error;
};

/// Ratio of variances requested with a vanishing denominator.
class UndefinedRatioError : public Error {
public:
    using Error::Error;
};

/// Quadrature grid cannot resolve the state band limit.
class BandLimitError : public Error {
public:
    using Error::Error;
};

/// Number of detected lobes differs from the number requested.
class CountMismatchError : public Error {
public:
    using Error::Error;
};

/// Malformed input document.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace sqzrot

#endif
