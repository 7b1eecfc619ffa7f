#include "heatlab/error.hpp"

namespace heatlab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::ConflictingDuplicateEdge: return "ConflictingDuplicateEdge";
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::InvalidVertex: return "InvalidVertex";
    case ErrorCode::RadiusOrderViolation: return "RadiusOrderViolation";
    case ErrorCode::SizeTooSmall: return "SizeTooSmall";
    case ErrorCode::LevelTooLarge: return "LevelTooLarge";
    case ErrorCode::SourceOutsideDomain: return "SourceOutsideDomain";
    case ErrorCode::TimeMismatch: return "TimeMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::OverlappingTerminals: return "OverlappingTerminals";
    case ErrorCode::SolverDivergence: return "SolverDivergence";
    case ErrorCode::TruncationViolation: return "TruncationViolation";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::OutOfTabulatedRange: return "OutOfTabulatedRange";
    case ErrorCode::InsufficientGrid: return "InsufficientGrid";
    case ErrorCode::NotApplicableBetaPrime: return "NotApplicableBetaPrime";
    case ErrorCode::ConfigOrderViolation: return "ConfigOrderViolation";
    case ErrorCode::CylinderTooSmall: return "CylinderTooSmall";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace heatlab
