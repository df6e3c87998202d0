#include "lyapnet/types.hpp"

namespace lyapnet {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotHurwitz: return "NotHurwitz";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidPair: return "InvalidPair";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SelfLoopInPriors: return "SelfLoopInPriors";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveAbscissa: return "NonPositiveAbscissa";
    case ErrorCode::RetryExhausted: return "RetryExhausted";
    case ErrorCode::Blowup: return "Blowup";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::ZeroOffDiagonal: return "ZeroOffDiagonal";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::IterLimit: return "IterLimit";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace lyapnet
