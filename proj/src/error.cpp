#include "mahler/error.hpp"

namespace mahler {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::ToleranceConflict: return "ToleranceConflict";
    case ErrorCode::NumericalDegeneracy: return "NumericalDegeneracy";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::CenterOutsideBody: return "CenterOutsideBody";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DualityViolation: return "DualityViolation";
    case ErrorCode::ParallelismAmbiguity: return "ParallelismAmbiguity";
    case ErrorCode::DegenerateDeformation: return "DegenerateDeformation";
    case ErrorCode::NoPersistence: return "NoPersistence";
    case ErrorCode::AffinenessViolation: return "AffinenessViolation";
    case ErrorCode::ConvexityViolation: return "ConvexityViolation";
    case ErrorCode::BoundViolation: return "BoundViolation";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::GenerationFailure: return "GenerationFailure";
    case ErrorCode::CounterexampleAlarm: return "CounterexampleAlarm";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_assertion_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::BoundViolation:
    case ErrorCode::CounterexampleAlarm:
    case ErrorCode::ConvexityViolation:
    case ErrorCode::AffinenessViolation:
    case ErrorCode::DualityViolation:
    case ErrorCode::InternalInconsistency:
      return true;
    default:
      return false;
  }
}

nlohmann::json Error::to_json() const {
  return {{"error", std::string(mahler::to_string(code_))}, {"message", what()}, {"detail", detail_}};
}

}  // namespace mahler
