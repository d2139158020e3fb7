#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oshi {

enum class ErrorCode {
  InvalidArgument,
  SchemaViolation,
  FileNotFound,
  DisconnectedCore,
  MissingPortPairs,
  RuleConflict,
  NoPath,
  LabelExhausted,
  EndpointConflict,
  UnknownService,
  UnboundPort,
  UnknownVtep,
  DisconnectedTerminals,
  UnprovisionedTarget,
  InsufficientVms,
  UnknownVm,
  ConflictingOverrides,
  UnmappedNode,
  UnknownKind,
  TooFewSamples,
  ZeroCost,
};

/// Stable upper-snake-case name used in JSON error bodies and CLI diagnostics.
std::string_view codeName(ErrorCode code);

/// Domain error. `subject` names the offending element (node id, JSON path,
/// service id, ...) and may be empty.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string subject = {})
      : std::runtime_error(std::move(message)), code_(code), subject_(std::move(subject)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& subject() const noexcept { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace oshi
