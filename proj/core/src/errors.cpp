#include "neurocnn/errors.hpp"

namespace neurocnn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonIntegralWidth: return "NonIntegralWidth";
    case ErrorCode::NonPositiveWidth: return "NonPositiveWidth";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::VarMismatch: return "VarMismatch";
    case ErrorCode::ZeroFilter: return "ZeroFilter";
    case ErrorCode::RequiresRGreaterOne: return "RequiresRGreaterOne";
    case ErrorCode::InadmissibleShift: return "InadmissibleShift";
    case ErrorCode::SingularPointRejected: return "SingularPointRejected";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonIntegralDegree: return "NonIntegralDegree";
    case ErrorCode::NonIntegralGED: return "NonIntegralGED";
    case ErrorCode::FormulaMismatch: return "FormulaMismatch";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::IllConditionedProjection: return "IllConditionedProjection";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonIntegralDegree:
    case ErrorCode::NonIntegralGED:
    case ErrorCode::FormulaMismatch:
      return ErrorKind::Consistency;
    case ErrorCode::SingularGram:
    case ErrorCode::IllConditionedProjection:
      return ErrorKind::Degeneracy;
    default:
      return ErrorKind::Precondition;
  }
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace neurocnn
