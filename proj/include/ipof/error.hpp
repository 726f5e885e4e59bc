#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ipof {

/// Bad configuration or arguments, detected before any heavy computation.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the 1-based line and (when known) column.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, std::size_t column, const std::string& what)
        : std::runtime_error(format(source, line, column, what)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& source, std::size_t line, std::size_t column,
                              const std::string& what) {
        std::string msg = source + ":" + std::to_string(line);
        if (column != 0) msg += ":" + std::to_string(column);
        return msg + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

/// Wraps an upstream failure with the pipeline stage it happened in.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what, bool invalid_input = false)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), invalid_input_(invalid_input) {}

    const std::string& stage() const noexcept { return stage_; }
    /// True when the underlying cause was a ValidationError.
    bool invalid_input() const noexcept { return invalid_input_; }

private:
    std::string stage_;
    bool invalid_input_;
};

}  // namespace ipof
