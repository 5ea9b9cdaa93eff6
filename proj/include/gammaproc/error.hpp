#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gammaproc {

/// Invalid argument outside a function's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed input file. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity that should be finite is not; the message names the term.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  FitError(const std::string& what, int iteration)
      : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class ChainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gammaproc
