#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qtflux {

enum class ErrorCode {
  NotHermitian,
  IndefiniteMatrix,
  Singular,
  NonIntegrable,
  MaxSubdivisions,
  FiberMismatch,
  NoConvergence,
  TruncationBudgetExceeded,
  StepUnderflow,
  WronskianDrift,
  ResonantDivision,
  DensityNotPSD,
  InsideGap,
  DomainExcluded,
  InvalidArgument,
  ConfigError,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace qtflux
