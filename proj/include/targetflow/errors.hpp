#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace targetflow {

// Malformed text input. Carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a semantic precondition (unknown node,
// empty target set, bad generator parameters, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A postcondition that can only fail if the library itself is wrong.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite values or an ill-conditioned solve in the numeric layer.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace targetflow
