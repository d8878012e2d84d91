#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crflow {

enum class ErrorKind {
  PoleSingularity,
  NonPositiveScale,
  TruncationLoss,
  BudgetExceeded,
  NonPositiveFactor,
  DegenerateDenominator,
  PositivityLoss,
  StepRejected,
  BetaGateViolation,
  NoConvergence,
  NonConvergentQuadrature,
  IndexOutOfRange,
  NonPositiveMin,
  InvalidArgument,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace crflow
