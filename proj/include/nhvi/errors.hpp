#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nhvi {

enum class ErrorKind {
  EvaluationFailure,
  SingularJacobian,
  DimensionMismatch,
  NotOnBoundary,
  DegenerateFrame,
  InvalidInitialState,
  PoleSingularity,
  NewtonFailure,
  AlphaOutOfRange,
  PersistentPenetration,
  RootSelectionAmbiguous,
  SchemaError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EvaluationFailure: return "EvaluationFailure";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotOnBoundary: return "NotOnBoundary";
    case ErrorKind::DegenerateFrame: return "DegenerateFrame";
    case ErrorKind::InvalidInitialState: return "InvalidInitialState";
    case ErrorKind::PoleSingularity: return "PoleSingularity";
    case ErrorKind::NewtonFailure: return "NewtonFailure";
    case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorKind::PersistentPenetration: return "PersistentPenetration";
    case ErrorKind::RootSelectionAmbiguous: return "RootSelectionAmbiguous";
    case ErrorKind::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

/// Where in a simulation an error surfaced. Filled in by the integrator as
/// the error propagates outward.
struct ErrorContext {
  std::optional<long> step;
  std::optional<double> time;
  std::optional<double> residual;
  std::string phase;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, ErrorContext context = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message),
        context_(std::move(context)) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }
  [[nodiscard]] const ErrorContext& context() const noexcept { return context_; }

  /// Copy of this error with step/time attached (existing fields win).
  [[nodiscard]] Error at(long step, double time) const {
    ErrorContext ctx = context_;
    if (!ctx.step) ctx.step = step;
    if (!ctx.time) ctx.time = time;
    return Error(kind_, detail_, std::move(ctx));
  }

 private:
  ErrorKind kind_;
  std::string detail_;
  ErrorContext context_;
};

}  // namespace nhvi
