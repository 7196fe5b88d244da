#pragma once

#include <stdexcept>
#include <string>

namespace barfi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector/matrix lengths disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

// NaN/Inf produced or consumed, or a singular system.
class NumericError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

// Caller misuse: empty batches, bad argument ranges.
class UsageError : public Error {
public:
    using Error::Error;
};

// Environment used out of order (stepping a finished episode).
class ProtocolError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

// Neumann iterates blew up; the eigenvalue scaling is too large.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace barfi
