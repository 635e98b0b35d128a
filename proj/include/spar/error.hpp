#pragma once

#include <stdexcept>
#include <string>

namespace spar {

// Base error for everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated precondition, invalid configuration or malformed user input.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Filesystem / serialization failures.
class IoError : public Error {
public:
    using Error::Error;
};

// Non-finite values where finiteness is required (e.g. diverged training).
class NumericsError : public Error {
public:
    using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw InvalidArgument(msg);
}

} // namespace spar
