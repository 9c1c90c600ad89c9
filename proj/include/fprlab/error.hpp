#pragma once

#include <stdexcept>
#include <string>

namespace fprlab {

enum class ErrorKind {
  InvalidArgument,
  ImaginaryResidueExceeded,
  InsufficientSamples,
  NonUniformGrid,
  ZeroArgument,
  DegenerateLeadingLag,
  NonConvergence,
  UnpairableRoots,
  OddUnitCircleMultiplicity,
  EnumerationBudgetExceeded,
  ZeroSignal,
  ZeroAnchor,
  NoFeasibleSolution,
  GridMismatch,
  StepDiverged,
  InvalidInstance,
  BudgetExceeded,
  OverflowBeyondPrecision,
  InvalidWitness,
  HypothesisViolated,
  SolverFailure,
  ParseError,
  KindMismatch,
  UnknownSolver,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ImaginaryResidueExceeded: return "ImaginaryResidueExceeded";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::NonUniformGrid: return "NonUniformGrid";
    case ErrorKind::ZeroArgument: return "ZeroArgument";
    case ErrorKind::DegenerateLeadingLag: return "DegenerateLeadingLag";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::UnpairableRoots: return "UnpairableRoots";
    case ErrorKind::OddUnitCircleMultiplicity: return "OddUnitCircleMultiplicity";
    case ErrorKind::EnumerationBudgetExceeded: return "EnumerationBudgetExceeded";
    case ErrorKind::ZeroSignal: return "ZeroSignal";
    case ErrorKind::ZeroAnchor: return "ZeroAnchor";
    case ErrorKind::NoFeasibleSolution: return "NoFeasibleSolution";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::StepDiverged: return "StepDiverged";
    case ErrorKind::InvalidInstance: return "InvalidInstance";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::OverflowBeyondPrecision: return "OverflowBeyondPrecision";
    case ErrorKind::InvalidWitness: return "InvalidWitness";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::SolverFailure: return "SolverFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::UnknownSolver: return "UnknownSolver";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code logic) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fprlab
