#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace simmap {

// Exit codes used by the CLI; every Error maps onto one of them.
enum class ErrorKind { validation = 2, io = 3, numeric = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Precondition or argument violation.
class ContractError : public Error {
public:
    explicit ContractError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// Input that has nothing to work with (empty stream, graph with no edges).
class EmptyInputError : public Error {
public:
    explicit EmptyInputError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class ConnectivityError : public Error {
public:
    explicit ConnectivityError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

/// A computation would exceed a configured memory ceiling.
class ResourceError : public Error {
public:
    explicit ResourceError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorKind::numeric, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

/// Malformed record. `line` is 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(ErrorKind::io, source + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace simmap
