#pragma once

#include <stdexcept>
#include <string>

namespace subsim {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A driver-side precondition was violated (a bug, not bad user input).
class InvariantError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Configuration document could not be parsed or failed validation.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message), field_(field) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Output could not be written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace subsim
