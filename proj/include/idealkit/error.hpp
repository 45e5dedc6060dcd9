#ifndef IDEALKIT_ERROR_HPP
#define IDEALKIT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace idealkit {

enum class ErrorKind {
  Parse,         // DSL syntax error
  Invariant,     // construction-time invariant violation
  SortMismatch,  // NatSet argument to GridSet expression or vice versa
  Window,        // element outside the configured window
  Exactness,     // value not representable in exact form
  Overflow,      // fixed-width arithmetic overflow
  Budget,        // search budget invalid or exhausted
  Resource,      // window/size cap exceeded
  Usage,         // bad CLI or API usage
  Io,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

/// Syntax error with source position, 1-based.
class ParseError : public Error {
public:
  ParseError(int line, int column, const std::string& msg)
      : Error(ErrorKind::Parse,
              "parse error at " + std::to_string(line) + ":" +
                  std::to_string(column) + ": " + msg),
        line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

}  // namespace idealkit

#endif
