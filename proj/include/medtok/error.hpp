#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace medtok {

/// Raised for bad input: malformed files, violated preconditions, bad flags.
/// The CLI maps it to exit code 1; anything else is an internal error (2).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& message)
      : std::runtime_error(message) {}

  ValidationError(std::string source, std::size_t line, const std::string& message)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + message),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  std::string source_;
  std::optional<std::size_t> line_;
};

}  // namespace medtok
