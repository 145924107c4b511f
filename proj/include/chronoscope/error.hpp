#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chronoscope {

enum class ErrorCode {
  MalformedUrl,
  OutOfScopeTld,
  UnknownSld,
  InvalidPolicy,
  MalformedLine,
  SelfLoop,
  UnsortedInput,
  InvalidSnapshot,
  FormatVersion,
  Io,
  EmptyFilter,
  EmptyGraph,
  ConvergenceFailure,
  LengthMismatch,
  DegenerateInput,
  InsufficientOverlap,
  TooFewMembers,
  MissingCoordinates,
  InsufficientData,
  NonPositiveValue,
  DegenerateDesign,
  InvalidArgument,
  InvalidSpec,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; `code()` is stable and
// machine-readable, `what()` carries the human detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace chronoscope
