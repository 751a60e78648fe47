#include "ilab/error.hpp"

namespace ilab {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonUnitMass: return "NonUnitMass";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::ZeroProbabilityEvent: return "ZeroProbabilityEvent";
    case ErrorCode::MissingKernelEntry: return "MissingKernelEntry";
    case ErrorCode::IncomparableOutcomes: return "IncomparableOutcomes";
    case ErrorCode::ModelTooLarge: return "ModelTooLarge";
    case ErrorCode::SampleLargerThanPopulation: return "SampleLargerThanPopulation";
    case ErrorCode::InfeasibleAllocation: return "InfeasibleAllocation";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::NonUnitMixture: return "NonUnitMixture";
    case ErrorCode::GridMiss: return "GridMiss";
    case ErrorCode::ValueNotInImage: return "ValueNotInImage";
    case ErrorCode::ZeroMassPhiSet: return "ZeroMassPhiSet";
    case ErrorCode::NotAComplement: return "NotAComplement";
    case ErrorCode::TargetNotTransformable: return "TargetNotTransformable";
    case ErrorCode::UnknownObservation: return "UnknownObservation";
    case ErrorCode::EmptyTables: return "EmptyTables";
    case ErrorCode::ZeroEvidence: return "ZeroEvidence";
    case ErrorCode::NotRubinShape: return "NotRubinShape";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::UnknownDesignVariant: return "UnknownDesignVariant";
    case ErrorCode::BadRational: return "BadRational";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace ilab
