#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace neurocnn {

enum class ErrorCode {
  // Caller violated a documented precondition.
  NonIntegralWidth,
  NonPositiveWidth,
  LengthMismatch,
  ShapeMismatch,
  VarMismatch,
  ZeroFilter,
  RequiresRGreaterOne,
  InadmissibleShift,
  SingularPointRejected,
  TooLarge,
  ParseError,
  // Internal consistency checks that must never fire.
  NonIntegralDegree,
  NonIntegralGED,
  FormulaMismatch,
  // The data make the requested computation ill-posed.
  SingularGram,
  IllConditionedProjection,
};

enum class ErrorKind { Precondition, Consistency, Degeneracy };

std::string_view to_string(ErrorCode code);
ErrorKind kind_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace neurocnn
