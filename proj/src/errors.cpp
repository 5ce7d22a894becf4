#include "qcbridge/errors.hpp"

namespace qcbridge {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kDegenerateMapping: return "degenerate-mapping";
    case ErrorKind::kSingularMapping: return "singular-mapping";
    case ErrorKind::kUnsupportedObservable: return "unsupported-observable";
    case ErrorKind::kSiteOutOfRange: return "site-out-of-range";
    case ErrorKind::kDimensionLimit: return "dimension-limit";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kInconsistentCorrelators: return "inconsistent-correlators";
    case ErrorKind::kSignProblem: return "sign-problem";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

BridgeError::BridgeError(ErrorKind kind, std::string module, const std::string& message)
    : std::runtime_error("[" + module + "] " + to_string(kind) + ": " + message),
      kind_(kind),
      module_(std::move(module)) {}

int BridgeError::exit_code() const noexcept {
  switch (kind_) {
    case ErrorKind::kValidation:
    case ErrorKind::kDegenerateMapping:
    case ErrorKind::kSingularMapping:
    case ErrorKind::kUnsupportedObservable:
    case ErrorKind::kSiteOutOfRange:
      return 2;
    case ErrorKind::kDimensionLimit:
    case ErrorKind::kNumeric:
    case ErrorKind::kInconsistentCorrelators:
    case ErrorKind::kSignProblem:
      return 3;
    case ErrorKind::kIo:
      return 4;
  }
  return 3;
}

void raise(ErrorKind kind, const char* module, const std::string& message) {
  throw BridgeError(kind, module, message);
}

}  // namespace qcbridge
