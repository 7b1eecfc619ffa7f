#ifndef HEATLAB_ERROR_HPP
#define HEATLAB_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace heatlab {

enum class ErrorCode {
  NonPositiveWeight,
  SelfLoop,
  ConflictingDuplicateEdge,
  DisconnectedGraph,
  InvalidVertex,
  RadiusOrderViolation,
  SizeTooSmall,
  LevelTooLarge,
  SourceOutsideDomain,
  TimeMismatch,
  ShapeMismatch,
  SingularSystem,
  OverlappingTerminals,
  SolverDivergence,
  TruncationViolation,
  NonConvergence,
  OutOfTabulatedRange,
  InsufficientGrid,
  NotApplicableBetaPrime,
  ConfigOrderViolation,
  CylinderTooSmall,
  EmptyInput,
  ParseError,
  IoError,
  UsageError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace heatlab

#endif  // HEATLAB_ERROR_HPP
