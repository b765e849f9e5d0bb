#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or dimensions that do not fit together.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A value violates a physical invariant (normalization, unitarity, positivity, passivity).
class PhysicsError : public Error {
public:
    using Error::Error;
};

/// An operation was called outside the conditions under which it is defined.
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace biphoton
