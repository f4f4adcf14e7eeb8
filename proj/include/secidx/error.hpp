#pragma once

#include <stdexcept>
#include <string>

namespace secidx {

// Base type for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad parameters, missing files, infeasible settings.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Value outside the operation's domain (m >= n, dimension mismatch, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Objects produced under different keys were mixed.
class KeyMismatchError : public Error {
public:
    using Error::Error;
};

// Lookup of an id that does not exist.
class NotFoundError : public Error {
public:
    using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractViolation : public Error {
public:
    using Error::Error;
};

} // namespace secidx
