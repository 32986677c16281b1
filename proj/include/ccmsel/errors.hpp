#pragma once

#include <stdexcept>
#include <string>

namespace ccmsel {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used in the CLI's error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error("domain_error", message) {}
};

/// TypeMixing or m4 requested on a graph with untyped nodes.
class TypedAttributeMissing : public Error {
 public:
  explicit TypedAttributeMissing(const std::string& message)
      : Error("typed_attribute_missing", message) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, long line)
      : Error("parse_error", message), line_(line) {}

  /// 1-based physical line number, header included.
  long line() const noexcept { return line_; }

 private:
  long line_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& message)
      : Error("schema_error", message) {}
};

class EmptyNetworkError : public Error {
 public:
  explicit EmptyNetworkError(const std::string& message)
      : Error("empty_network", message) {}
};

/// Quadrature did not reach its tolerance.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message)
      : Error("numeric_error", message) {}
};

/// Newton ascent failed to converge.
class OptimizationError : public Error {
 public:
  explicit OptimizationError(const std::string& message)
      : Error("optimization_error", message) {}
};

/// Hessian at the mode is not negative definite.
class DegeneratePosteriorError : public Error {
 public:
  explicit DegeneratePosteriorError(const std::string& message)
      : Error("degenerate_posterior", message) {}
};

/// A fitted prior would have zero spread.
class DegeneratePriorError : public Error {
 public:
  explicit DegeneratePriorError(const std::string& message)
      : Error("degenerate_prior", message) {}
};

/// Exhaustive enumeration requested beyond its size limit.
class RefusalError : public Error {
 public:
  explicit RefusalError(const std::string& message)
      : Error("refusal", message) {}
};

}  // namespace ccmsel
