#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridunit {

// Base class for everything the library reports by throwing. Evaluation
// failures are never exceptions; they travel as error values instead.
class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Reader failure with an optional source position (1-based, 0 = unknown).
class ParseError : public GridError {
public:
    ParseError(const std::string& msg, std::size_t line = 0, std::size_t column = 0)
        : GridError(decorate(msg, line, column)), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string decorate(const std::string& msg, std::size_t line, std::size_t column) {
        std::string out;
        if (line > 0) {
            out += "line " + std::to_string(line);
            if (column > 0) out += ", col " + std::to_string(column);
            out += ": ";
        } else if (column > 0) {
            out += "col " + std::to_string(column) + ": ";
        }
        return out + msg;
    }

    std::size_t line_;
    std::size_t column_;
};

}  // namespace gridunit
