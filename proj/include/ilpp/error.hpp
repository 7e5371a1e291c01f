#pragma once

#include <stdexcept>
#include <string>

namespace ilpp {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: bad parameters, malformed files, inconsistent configs.
/// The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A query outside the set where a quantity is defined (|w| > 1 for gamma,
/// points outside the rectangle Q for alpha).
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// The numerics could not produce a trustworthy result (non-finite values,
/// window overrun in the exclusion process, ...). CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace ilpp
