#pragma once

#include <stdexcept>
#include <string>

namespace cflb {

/// Base of every exception the toolkit throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: shape mismatch, out-of-range parameter, malformed file.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Input is well-formed but carries no usable information (zero variance).
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// A solver produced a non-finite or singular quantity.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Filesystem and decode failures.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cflb
