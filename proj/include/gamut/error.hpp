#pragma once

#include <stdexcept>
#include <string>

namespace gamut {

// Error categories map onto CLI exit codes: Usage=2, Input=3, Resource=4.
// Syntax/Dialect/Protocol/Compile are all input-class failures; they are
// kept distinct so tests and messages can tell them apart.
enum class ErrorKind {
    Usage,
    Syntax,    // malformed text (formula or file formats)
    Dialect,   // grammatically readable but outside the requested dialect
    Input,     // unknown names, undeclared atoms, contract violations
    Protocol,  // disallowed joint action
    Compile,   // reduction-level failures (name capture, empty initial set)
    Resource,  // exceeded an explicit bound
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, int line = 0, int column = 0)
        : std::runtime_error(locate(message, line, column)),
          kind_(kind), line_(line), column_(column) {}

    ErrorKind kind() const noexcept { return kind_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    static std::string locate(const std::string& msg, int line, int column) {
        if (line <= 0) return msg;
        return std::to_string(line) + ":" + std::to_string(column) + ": " + msg;
    }

    ErrorKind kind_;
    int line_;
    int column_;
};

} // namespace gamut
