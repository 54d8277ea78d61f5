#pragma once

#include <stdexcept>
#include <string>

namespace emdcast {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: invalid arguments, malformed files, series too short.
class InputError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed on otherwise valid input.
class ComputationError : public Error {
public:
    using Error::Error;
};

/// Raised by the sifting routines when the signal has no usable extrema.
/// Callers of the decomposition loop treat the signal as the residual.
class MonotoneSignal : public Error {
public:
    using Error::Error;
};

} // namespace emdcast
