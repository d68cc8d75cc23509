#pragma once

#include <stdexcept>
#include <string>

namespace hrsnn {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent configuration (distribution families, bounds, probabilities).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A call violated a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// NaN/Inf, blow-ups, failed factorizations, runaway point processes.
class NumericalError : public Error {
public:
    using Error::Error;
};

// Input data unusable for the requested computation.
class DataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hrsnn
