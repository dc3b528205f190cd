#pragma once

#include <stdexcept>
#include <string>

namespace ktap {

/// Invalid model or configuration parameter (bad grid size, mu out of range, ...).
class invalid_parameter_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Mismatched array/matrix dimensions between operands.
class dimension_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Index outside the valid class/subsystem range.
class index_error : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Non-finite values or other failures during time integration.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File read/write failure; carries the offending path in the message.
class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scenario/sweep document error with source location.
class config_error : public std::runtime_error {
public:
    config_error(std::string message, int line = 0, int column = 0)
        : std::runtime_error(format(message, line, column)),
          line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string format(const std::string& message, int line, int column) {
        if (line <= 0) return message;
        std::string s = "line " + std::to_string(line);
        if (column > 0) s += ", col " + std::to_string(column);
        return s + ": " + message;
    }

    int line_;
    int column_;
};

} // namespace ktap
