#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lpbot::logic {

enum class ErrorKind {
  syntax,
  instantiation,
  type,
  evaluation,
  existence,
  permission,
  resource,
};

const char* to_string(ErrorKind kind);

/// Error raised by the parser or during resolution.
class EngineError : public std::runtime_error {
 public:
  EngineError(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public EngineError {
 public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message,
              const std::string& excerpt);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& excerpt() const { return excerpt_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string excerpt_;
};

}  // namespace lpbot::logic
