#pragma once

#include <stdexcept>
#include <string>

namespace revsurf {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data or parameters violate a documented precondition. The CLI maps
/// these to exit status 1.
class ValidationFailure : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not reach its target. The CLI maps these to
/// exit status 2.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

#define REVSURF_DECLARE_ERROR(Name, Base) \
  class Name : public Base {              \
   public:                                \
    using Base::Base;                     \
  };

REVSURF_DECLARE_ERROR(NonPositiveWarping, ValidationFailure)
REVSURF_DECLARE_ERROR(InvalidWarping, ValidationFailure)
REVSURF_DECLARE_ERROR(PoleLaunchWithSpin, ValidationFailure)
REVSURF_DECLARE_ERROR(BranchViolation, ValidationFailure)
REVSURF_DECLARE_ERROR(DomainViolation, ValidationFailure)
REVSURF_DECLARE_ERROR(PreconditionViolation, ValidationFailure)
REVSURF_DECLARE_ERROR(GridMismatch, ValidationFailure)
REVSURF_DECLARE_ERROR(ValidationError, ValidationFailure)
REVSURF_DECLARE_ERROR(OdeFailure, NumericalFailure)
REVSURF_DECLARE_ERROR(NoConnectionFound, NumericalFailure)

#undef REVSURF_DECLARE_ERROR

/// Malformed input text; carries the 1-based line number (0 when unknown).
class ParseError : public ValidationFailure {
 public:
  ParseError(const std::string& what, int line)
      : ValidationFailure(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A bound that holds analytically was violated by computed data.
class AuditFailure : public NumericalFailure {
 public:
  AuditFailure(const std::string& what, std::size_t node, double t)
      : NumericalFailure(what), node_(node), t_(t) {}
  std::size_t node() const noexcept { return node_; }
  double t() const noexcept { return t_; }

 private:
  std::size_t node_;
  double t_;
};

}  // namespace revsurf
