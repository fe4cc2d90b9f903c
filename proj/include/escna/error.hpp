#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace escna {

// Base class for every error the library reports deliberately.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Syntax or name-resolution failure while parsing an expression source string.
// Carries the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Runtime evaluation failure: unbound variable or a domain error such as
// division by zero or sqrt of a negative number.
class EvalError : public Error {
public:
    using Error::Error;
};

// Invalid system/controller configuration (schema violations, bad parameter
// values, unknown builtin names).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Numeric failure: integer overflow in exact arithmetic, singular linear
// systems, root brackets without a sign change, quadrature resolution guards.
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace escna
