#pragma once

#include <stdexcept>
#include <string>

namespace spectramech {

/// Broad failure classes. The CLI maps each class to its own exit code.
enum class ErrorClass { parse, invariant, solver };

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
  ErrorClass error_class() const noexcept { return class_; }

 private:
  ErrorClass class_;
};

/// Malformed configuration text.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorClass::parse, what) {}
};

/// An argument lies outside the domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorClass::invariant, what) {}
};

/// A model object violates one of its invariants, or a setting is unusable.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorClass::invariant, what) {}
};

/// The virtual-type profile is not certified regular and no override was given.
class RegularityError : public ConfigError {
 public:
  explicit RegularityError(const std::string& what) : ConfigError(what) {}
};

/// An iterative solver failed to converge.
class SolverError : public Error {
 public:
  explicit SolverError(const std::string& what) : Error(ErrorClass::solver, what) {}
};

/// A computation produced a non-finite value.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorClass::solver, what) {}
};

}  // namespace spectramech
