#include "oshi/error.hpp"

namespace oshi {

std::string_view codeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::SchemaViolation: return "SCHEMA_VIOLATION";
    case ErrorCode::FileNotFound: return "FILE_NOT_FOUND";
    case ErrorCode::DisconnectedCore: return "DISCONNECTED_CORE";
    case ErrorCode::MissingPortPairs: return "MISSING_PORT_PAIRS";
    case ErrorCode::RuleConflict: return "RULE_CONFLICT";
    case ErrorCode::NoPath: return "NO_PATH";
    case ErrorCode::LabelExhausted: return "LABEL_EXHAUSTED";
    case ErrorCode::EndpointConflict: return "ENDPOINT_CONFLICT";
    case ErrorCode::UnknownService: return "UNKNOWN_SERVICE";
    case ErrorCode::UnboundPort: return "UNBOUND_PORT";
    case ErrorCode::UnknownVtep: return "UNKNOWN_VTEP";
    case ErrorCode::DisconnectedTerminals: return "DISCONNECTED_TERMINALS";
    case ErrorCode::UnprovisionedTarget: return "UNPROVISIONED_TARGET";
    case ErrorCode::InsufficientVms: return "INSUFFICIENT_VMS";
    case ErrorCode::UnknownVm: return "UNKNOWN_VM";
    case ErrorCode::ConflictingOverrides: return "CONFLICTING_OVERRIDES";
    case ErrorCode::UnmappedNode: return "UNMAPPED_NODE";
    case ErrorCode::UnknownKind: return "UNKNOWN_KIND";
    case ErrorCode::TooFewSamples: return "TOO_FEW_SAMPLES";
    case ErrorCode::ZeroCost: return "ZERO_COST";
  }
  return "UNKNOWN";
}

}  // namespace oshi
