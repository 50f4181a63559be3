#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace typeqal {

/// Malformed type-annotation expression. `offset` is the byte offset into
/// the annotation string where parsing failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Python source that cannot be tokenized or structurally parsed.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t offset)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line),
        offset_(offset) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class CheckerNotFound : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class CheckerCrashed : public std::runtime_error {
 public:
  CheckerCrashed(const std::string& what, std::string output)
      : std::runtime_error(what), output_(std::move(output)) {}

  const std::string& output() const noexcept { return output_; }

 private:
  std::string output_;
};

}  // namespace typeqal
