#include "hbpl/error.hpp"

namespace hbpl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDimension: return "invalid-dimension";
    case ErrorCode::kInvalidConstants: return "invalid-constants";
    case ErrorCode::kMissingGradient: return "missing-gradient";
    case ErrorCode::kIntegrationBudgetExceeded: return "integration-budget-exceeded";
    case ErrorCode::kNumericalBlowup: return "numerical-blowup";
    case ErrorCode::kInfeasibleDamping: return "infeasible-damping";
    case ErrorCode::kVacuousEpsilon: return "vacuous-epsilon";
    case ErrorCode::kNoFeasibleDelta: return "no-feasible-delta";
    case ErrorCode::kEmptyEstimate: return "empty-estimate";
    case ErrorCode::kMissingOracle: return "missing-oracle";
    case ErrorCode::kNoImplication: return "no-implication";
    case ErrorCode::kProxBudgetExceeded: return "prox-budget-exceeded";
    case ErrorCode::kMissingConstant: return "missing-constant";
    case ErrorCode::kMissingVelocities: return "missing-velocities";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kUnknownFunction: return "unknown-function";
    case ErrorCode::kConfig: return "config-error";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

Error::Error(ErrorCode code, const std::string& message, double last_valid_time)
    : Error(code, message) {
  last_valid_time_ = last_valid_time;
}

}  // namespace hbpl
