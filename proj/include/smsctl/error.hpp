#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace smsctl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text; line is 1-based, 0 when not line-oriented.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class StructuralError : public Error { using Error::Error; };
class LookupError : public Error { using Error::Error; };
class ContractError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class StateError : public Error { using Error::Error; };
class SizeError : public Error { using Error::Error; };
class ValidationError : public Error { using Error::Error; };

} // namespace smsctl
