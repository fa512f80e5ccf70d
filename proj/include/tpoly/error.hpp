#ifndef TPOLY_ERROR_HPP
#define TPOLY_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpoly {

enum class ErrorKind {
  Unbalanced,
  NonPositiveMargin,
  DisconnectedAllowedGraph,
  IndexOutOfRange,
  NotASpanningTree,
  UsesForbiddenEdge,
  DegeneratePivot,
  EdgeAlreadyPresent,
  ForbiddenEdge,
  NonVertexInput,
  ShadedEdgeDeleted,
  NoMinusEdge,
  NoEdgeToShade,
  DiagnosticFailure,
  BudgetExceeded,
  DegenerateInstance,
  VertexNotFound,
  BoundViolation,
  UnboundedNetwork,
  InvalidNetwork,
  InfeasibleFlow,
  ParseError,
  GenerationFailed,
  PerturbationFailed,
  Overflow,
};

inline constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Unbalanced: return "Unbalanced";
    case ErrorKind::NonPositiveMargin: return "NonPositiveMargin";
    case ErrorKind::DisconnectedAllowedGraph: return "DisconnectedAllowedGraph";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NotASpanningTree: return "NotASpanningTree";
    case ErrorKind::UsesForbiddenEdge: return "UsesForbiddenEdge";
    case ErrorKind::DegeneratePivot: return "DegeneratePivot";
    case ErrorKind::EdgeAlreadyPresent: return "EdgeAlreadyPresent";
    case ErrorKind::ForbiddenEdge: return "ForbiddenEdge";
    case ErrorKind::NonVertexInput: return "NonVertexInput";
    case ErrorKind::ShadedEdgeDeleted: return "ShadedEdgeDeleted";
    case ErrorKind::NoMinusEdge: return "NoMinusEdge";
    case ErrorKind::NoEdgeToShade: return "NoEdgeToShade";
    case ErrorKind::DiagnosticFailure: return "DiagnosticFailure";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::DegenerateInstance: return "DegenerateInstance";
    case ErrorKind::VertexNotFound: return "VertexNotFound";
    case ErrorKind::BoundViolation: return "BoundViolation";
    case ErrorKind::UnboundedNetwork: return "UnboundedNetwork";
    case ErrorKind::InvalidNetwork: return "InvalidNetwork";
    case ErrorKind::InfeasibleFlow: return "InfeasibleFlow";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::GenerationFailed: return "GenerationFailed";
    case ErrorKind::PerturbationFailed: return "PerturbationFailed";
    case ErrorKind::Overflow: return "Overflow";
  }
  return "Unknown";
}

/// Errors that indicate a broken implementation rather than bad input.
/// The CLI maps these to a separate exit code.
inline constexpr bool is_internal(ErrorKind kind) {
  return kind == ErrorKind::ShadedEdgeDeleted || kind == ErrorKind::NoMinusEdge ||
         kind == ErrorKind::NoEdgeToShade || kind == ErrorKind::DiagnosticFailure ||
         kind == ErrorKind::BoundViolation;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace tpoly

#endif
