#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hbpl {

enum class ErrorCode {
  kInvalidDimension,
  kInvalidConstants,
  kMissingGradient,
  kIntegrationBudgetExceeded,
  kNumericalBlowup,
  kInfeasibleDamping,
  kVacuousEpsilon,
  kNoFeasibleDelta,
  kEmptyEstimate,
  kMissingOracle,
  kNoImplication,
  kProxBudgetExceeded,
  kMissingConstant,
  kMissingVelocities,
  kInsufficientData,
  kUnknownFunction,
  kConfig,
};

/// Kebab-case name used in messages and JSON output.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, double last_valid_time);

  ErrorCode code() const noexcept { return code_; }

  /// Set for kNumericalBlowup: the last time at which the state was finite.
  std::optional<double> last_valid_time() const noexcept { return last_valid_time_; }

 private:
  ErrorCode code_;
  std::optional<double> last_valid_time_;
};

}  // namespace hbpl
