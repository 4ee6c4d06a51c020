#include "zakline/error.hpp"

namespace zakline {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::DefectiveMatrix: return "DefectiveMatrix";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::PairingAmbiguous: return "PairingAmbiguous";
    case ErrorCode::SelfOrthogonal: return "SelfOrthogonal";
    case ErrorCode::SubspaceCollapse: return "SubspaceCollapse";
    case ErrorCode::BandCrossing: return "BandCrossing";
    case ErrorCode::VanishingOverlap: return "VanishingOverlap";
    case ErrorCode::NoUsableComponent: return "NoUsableComponent";
    case ErrorCode::ClosureFailure: return "ClosureFailure";
    case ErrorCode::NotSmoothed: return "NotSmoothed";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::BrokenRegime: return "BrokenRegime";
    case ErrorCode::DegenerateRatio: return "DegenerateRatio";
  }
  return "Unknown";
}

}  // namespace zakline
