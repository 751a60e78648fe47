#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ilab {

enum class ErrorCode {
  NonUnitMass,
  NegativeWeight,
  ZeroProbabilityEvent,
  MissingKernelEntry,
  IncomparableOutcomes,
  ModelTooLarge,
  SampleLargerThanPopulation,
  InfeasibleAllocation,
  ProbabilityOutOfRange,
  NonUnitMixture,
  GridMiss,
  ValueNotInImage,
  ZeroMassPhiSet,
  NotAComplement,
  TargetNotTransformable,
  UnknownObservation,
  EmptyTables,
  ZeroEvidence,
  NotRubinShape,
  SyntaxError,
  SchemaError,
  UnknownDesignVariant,
  BadRational,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

/// Every failure raised by the engine carries one of the codes above so that
/// callers (and the CLI exit-code mapping) can branch on the kind of error.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ilab
