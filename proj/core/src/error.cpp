#include "backflow/error.hpp"

namespace backflow {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::SameMode: return "SameMode";
    case ErrorCode::NormViolation: return "NormViolation";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NoInteriorMax: return "NoInteriorMax";
    case ErrorCode::NonPositiveData: return "NonPositiveData";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace backflow
