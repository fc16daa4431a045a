#pragma once

#include <stdexcept>
#include <string>

namespace bva {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes that do not fit the operator or grid they are used with.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Geometry that cannot support the requested construction.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two independent numerical routes disagree, or a result fails its own check.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

/// Input that is valid syntactically but degenerate for the requested measurement.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

}  // namespace bva
