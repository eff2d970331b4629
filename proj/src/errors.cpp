#include "qtflux/errors.hpp"

namespace qtflux {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::IndefiniteMatrix: return "IndefiniteMatrix";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NonIntegrable: return "NonIntegrable";
    case ErrorCode::MaxSubdivisions: return "MaxSubdivisions";
    case ErrorCode::FiberMismatch: return "FiberMismatch";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::TruncationBudgetExceeded: return "TruncationBudgetExceeded";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::WronskianDrift: return "WronskianDrift";
    case ErrorCode::ResonantDivision: return "ResonantDivision";
    case ErrorCode::DensityNotPSD: return "DensityNotPSD";
    case ErrorCode::InsideGap: return "InsideGap";
    case ErrorCode::DomainExcluded: return "DomainExcluded";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

void raise(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace qtflux
