#pragma once

#include <stdexcept>
#include <string>

namespace symbio {

// Base of every error raised by the library. `input_error()` marks failures
// caused by bad user input (files, configs, grammar) as opposed to internal
// runtime failures; the CLI maps them to different exit statuses.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual auto kind() const -> const char* { return "runtime"; }
    [[nodiscard]] virtual auto input_error() const -> bool { return false; }
};

// Arity mismatch or malformed tree.
class StructuralError : public Error {
public:
    using Error::Error;
    [[nodiscard]] auto kind() const -> const char* override { return "structural"; }
};

// Non-finite value or out-of-range feature index during evaluation.
class EvaluationError : public Error {
public:
    using Error::Error;
    [[nodiscard]] auto kind() const -> const char* override { return "evaluation"; }
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error(what), position_(position) {}
    [[nodiscard]] auto kind() const -> const char* override { return "parse"; }
    [[nodiscard]] auto input_error() const -> bool override { return true; }
    // 1-based token index, 0 when not tied to a token.
    [[nodiscard]] auto position() const -> std::size_t { return position_; }

private:
    std::size_t position_;
};

class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] auto kind() const -> const char* override { return "config"; }
    [[nodiscard]] auto input_error() const -> bool override { return true; }
};

class DataError : public Error {
public:
    using Error::Error;
    [[nodiscard]] auto kind() const -> const char* override { return "data"; }
    [[nodiscard]] auto input_error() const -> bool override { return true; }
};

class DimensionError : public Error {
public:
    using Error::Error;
    [[nodiscard]] auto kind() const -> const char* override { return "dimension"; }
};

class StateError : public Error {
public:
    using Error::Error;
    [[nodiscard]] auto kind() const -> const char* override { return "state"; }
};

class FitError : public Error {
public:
    using Error::Error;
    [[nodiscard]] auto kind() const -> const char* override { return "fit"; }
};

} // namespace symbio
