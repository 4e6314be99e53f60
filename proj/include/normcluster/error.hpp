#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace normcluster {

/// Bad or inconsistent input: malformed files, violated preconditions,
/// unknown identifiers. The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input error tied to a line of a line-oriented file (1-based).
class ParseError : public InputError {
public:
  ParseError(std::size_t line, const std::string& detail)
      : InputError("line " + std::to_string(line) + ": " + detail), line_(line), detail_(detail) {}
  ParseError(const std::string& path, std::size_t line, const std::string& detail)
      : InputError(path + ":" + std::to_string(line) + ": " + detail), line_(line), detail_(detail) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

private:
  std::size_t line_;
  std::string detail_;
};

}  // namespace normcluster
