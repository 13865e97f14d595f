#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rsbm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A variable is missing from an assignment or a variable set.
class DomainError : public Error {
public:
    using Error::Error;
};

class GraphError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column) {}

    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class EncodingError : public Error {
public:
    using Error::Error;
};

class ExtractionError : public Error {
public:
    using Error::Error;
};

class EmissionError : public Error {
public:
    using Error::Error;
};

class CompositionError : public Error {
public:
    using Error::Error;
};

class InvalidPropertyError : public Error {
public:
    using Error::Error;
};

/// The initial composite state is already doomed to reach a bad state.
class UnrepairableError : public Error {
public:
    using Error::Error;
};

class RepairUnsoundError : public Error {
public:
    using Error::Error;
};

} // namespace rsbm
