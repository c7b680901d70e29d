#pragma once

#include <stdexcept>
#include <string>

namespace unitary {

enum class ErrorKind {
  InvalidInput,
  NotInDomain,
  PrecisionLoss,
  NotInvertible,
  NotUnit,
  NotInQuadraticValue,
  BudgetExceeded,
  HypothesisViolated,
  Unsupported,
  CenterFactorizationFailed,
  SplitnessUndecidable,
  NotSplitOrthogonal,
  NotUnimodular,
  RankMismatch,
  DicksonObstruction,
  ResidueFieldTooSmall,
  NotIdempotent,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace unitary
