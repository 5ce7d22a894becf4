#pragma once

#include <stdexcept>
#include <string>

namespace qcbridge {

enum class ErrorKind {
  kValidation,
  kDegenerateMapping,
  kSingularMapping,
  kUnsupportedObservable,
  kSiteOutOfRange,
  kDimensionLimit,
  kNumeric,
  kInconsistentCorrelators,
  kSignProblem,
  kIo,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries the module it came from, so the
// CLI can report "[trotter_map] ..." and map the kind onto an exit code.
class BridgeError : public std::runtime_error {
 public:
  BridgeError(ErrorKind kind, std::string module, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

  // 2 for validation-type errors, 3 for numeric or size-cap errors, 4 for I/O.
  int exit_code() const noexcept;

 private:
  ErrorKind kind_;
  std::string module_;
};

[[noreturn]] void raise(ErrorKind kind, const char* module, const std::string& message);

}  // namespace qcbridge
