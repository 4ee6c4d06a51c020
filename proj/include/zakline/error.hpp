#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zakline {

/// Failure categories raised by the numerical core. The C API maps each one
/// onto a status code of the same name.
enum class ErrorCode {
  InvalidArgument,
  ParseError,
  ValidationError,
  DefectiveMatrix,
  NoConvergence,
  PairingAmbiguous,
  SelfOrthogonal,
  SubspaceCollapse,
  BandCrossing,
  VanishingOverlap,
  NoUsableComponent,
  ClosureFailure,
  NotSmoothed,
  DomainError,
  BrokenRegime,
  DegenerateRatio,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace zakline
