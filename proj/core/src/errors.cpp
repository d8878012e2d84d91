#include "crflow/errors.hpp"

namespace crflow {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PoleSingularity: return "PoleSingularity";
    case ErrorKind::NonPositiveScale: return "NonPositiveScale";
    case ErrorKind::TruncationLoss: return "TruncationLoss";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NonPositiveFactor: return "NonPositiveFactor";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::PositivityLoss: return "PositivityLoss";
    case ErrorKind::StepRejected: return "StepRejected";
    case ErrorKind::BetaGateViolation: return "BetaGateViolation";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonConvergentQuadrature: return "NonConvergentQuadrature";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonPositiveMin: return "NonPositiveMin";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace crflow
