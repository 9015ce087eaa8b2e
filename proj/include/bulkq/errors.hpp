#pragma once

#include <stdexcept>
#include <string>

namespace bulkq {

// Exit-code mapping used by the CLI: GuardError/DomainError -> 2,
// ParseError -> 3, InternalError -> 4.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A size/enumeration guard was exceeded (dense matrices, branch counts).
class GuardError : public Error {
  public:
    using Error::Error;
};

// Invalid argument values: bad probabilities, mismatched dimensions,
// degenerate configurations the caller did not opt into.
class DomainError : public Error {
  public:
    using Error::Error;
};

// Malformed input text (truth tables, circuit files, CLI values).
class ParseError : public Error {
  public:
    ParseError(const std::string& what, int line = 0, int column = 0)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

  private:
    static std::string format(const std::string& what, int line, int column) {
        if (line <= 0) return what;
        std::string out = "line " + std::to_string(line);
        if (column > 0) out += ", column " + std::to_string(column);
        return out + ": " + what;
    }

    int line_ = 0;
    int column_ = 0;
};

// A proven invariant failed at runtime. Must never happen; if it does the
// build is broken and the process exits with code 4.
class InternalError : public Error {
  public:
    using Error::Error;
};

} // namespace bulkq
