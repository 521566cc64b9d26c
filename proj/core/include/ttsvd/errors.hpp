#pragma once

#include <stdexcept>
#include <string>

namespace ttsvd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Incompatible extents, bond ranks, mode indices or unfolding requests.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Arguments outside their documented domain (negative tolerances, bad K, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// NaN or infinite input to a dense kernel.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Materialization or generator budget exceeded.
class BudgetError : public Error {
public:
    using Error::Error;
};

/// Malformed solver or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed or truncated serialized container.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace ttsvd
