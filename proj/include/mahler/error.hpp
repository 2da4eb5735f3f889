#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace mahler {

enum class ErrorCode {
  InvalidArgument,
  DegenerateInput,
  ToleranceConflict,
  NumericalDegeneracy,
  SingularMatrix,
  CenterOutsideBody,
  NonConvergence,
  DualityViolation,
  ParallelismAmbiguity,
  DegenerateDeformation,
  NoPersistence,
  AffinenessViolation,
  ConvexityViolation,
  BoundViolation,
  InternalInconsistency,
  GenerationFailure,
  CounterexampleAlarm,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Findings that indicate a broken invariant rather than bad input.
bool is_assertion_class(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, nlohmann::json detail = nlohmann::json::object())
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& detail() const noexcept { return detail_; }

  nlohmann::json to_json() const;

 private:
  ErrorCode code_;
  nlohmann::json detail_;
};

}  // namespace mahler
