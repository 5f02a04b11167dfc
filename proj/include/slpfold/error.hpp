#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slpfold {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed .slp / .caut input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// A word is longer than a caller-supplied expansion or step budget allows.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class UnsupportedAlphabet : public Error {
 public:
  using Error::Error;
};

/// An operation requiring a deterministic automaton was handed a non-deterministic one.
class NondeterminismError : public Error {
 public:
  NondeterminismError(const std::string& what, std::size_t first, std::size_t second)
      : Error(what), first_(first), second_(second) {}
  std::size_t first() const noexcept { return first_; }
  std::size_t second() const noexcept { return second_; }

 private:
  std::size_t first_, second_;
};

class InvolutionError : public Error {
 public:
  using Error::Error;
};

/// Input violates a documented precondition (not freely reduced, empty word, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A checked algorithmic invariant failed at runtime.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace slpfold
