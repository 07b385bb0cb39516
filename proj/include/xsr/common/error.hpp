#pragma once

#include <stdexcept>
#include <string>

namespace xsr {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Violation of a documented precondition (e.g. variable index out of range).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& message) : Error(message) {}
};

// Syntax error in expression text or a manifest, annotated with a position.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error(message + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error(message) {}
};

}  // namespace xsr
