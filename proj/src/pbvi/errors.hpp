#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pbvi {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text in a model or policy file. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A model violates a structural invariant (normalization, ranges, counts).
class ModelError : public Error {
public:
    using Error::Error;
};

class UnknownIdentifier : public ParseError {
public:
    UnknownIdentifier(const std::string& name, std::size_t line)
        : ParseError("unknown identifier '" + name + "'", line) {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Pr(z | b, a) vanished: the observation cannot follow this belief/action.
class ZeroLikelihood : public Error {
public:
    using Error::Error;
};

/// Exact enumeration would generate more vectors than the configured cap.
class SizeLimitExceeded : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pbvi
