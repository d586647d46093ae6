#pragma once

#include <stdexcept>
#include <string>

namespace riskcard {

// Base of every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hyperparameters or constraint boxes that cannot describe a valid problem.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input data that does not satisfy the documented preconditions.
class DataError : public Error {
 public:
  using Error::Error;
};

// A record or dataset whose columns do not match a fitted binarization map.
class SchemaMismatch : public DataError {
 public:
  SchemaMismatch(const std::string& variable, const std::string& what)
      : DataError(what), variable_(variable) {}
  const std::string& variable() const noexcept { return variable_; }

 private:
  std::string variable_;
};

// A solution that breaks one of the sparsity, box, group, or sign constraints.
class ConstraintViolation : public Error {
 public:
  ConstraintViolation(const std::string& constraint, const std::string& what)
      : Error(what), constraint_(constraint) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

// Metric that is not defined for the given input (e.g. AUROC on one class).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

// Malformed or version-incompatible document. `location` is a JSON pointer
// or "line:column" depending on the source.
class ParseError : public Error {
 public:
  ParseError(const std::string& location, const std::string& what)
      : Error(location.empty() ? what : location + ": " + what),
        location_(location) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

}  // namespace riskcard
