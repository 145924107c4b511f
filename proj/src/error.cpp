#include "chronoscope/error.hpp"

namespace chronoscope {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedUrl: return "MalformedUrl";
    case ErrorCode::OutOfScopeTld: return "OutOfScopeTld";
    case ErrorCode::UnknownSld: return "UnknownSld";
    case ErrorCode::InvalidPolicy: return "InvalidPolicy";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::UnsortedInput: return "UnsortedInput";
    case ErrorCode::InvalidSnapshot: return "InvalidSnapshot";
    case ErrorCode::FormatVersion: return "FormatVersion";
    case ErrorCode::Io: return "Io";
    case ErrorCode::EmptyFilter: return "EmptyFilter";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
    case ErrorCode::TooFewMembers: return "TooFewMembers";
    case ErrorCode::MissingCoordinates: return "MissingCoordinates";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NonPositiveValue: return "NonPositiveValue";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

}  // namespace chronoscope
