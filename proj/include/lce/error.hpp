#ifndef LCE_ERROR_HPP
#define LCE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lce {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, empty set, p >= q, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A configured size or memory cap would be exceeded.
class CapacityExceeded : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed (non-finite value, quadrature or LP non-convergence).
class NumericalError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) {
        throw InvalidArgument(what);
    }
}

} // namespace detail
} // namespace lce

#endif // LCE_ERROR_HPP
