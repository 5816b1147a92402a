#pragma once

#include <stdexcept>
#include <string>

namespace ocdmd {

// Coarse classification used by front ends to map failures to exit codes.
enum class ErrorCategory { Data, Numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Data, what) {}
};

// Malformed trajectory or model file; the message names file and line.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what);
  explicit ParseError(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

// Model references trajectory files whose contents changed since fitting.
class StaleModelError : public Error {
 public:
  explicit StaleModelError(const std::string& what)
      : Error(ErrorCategory::Data, what) {}
};

class NumericRangeError : public Error {
 public:
  explicit NumericRangeError(const std::string& what)
      : Error(ErrorCategory::Numeric, what) {}
};

class DivergenceError : public Error {
 public:
  DivergenceError(double time, const std::string& what)
      : Error(ErrorCategory::Numeric, what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

class SingularGramError : public Error {
 public:
  explicit SingularGramError(const std::string& what)
      : Error(ErrorCategory::Numeric, what) {}
};

// Eigenvector (near) G-orthogonal to the data span, or a singular modal Gram.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what)
      : Error(ErrorCategory::Numeric, what) {}
};

}  // namespace ocdmd
