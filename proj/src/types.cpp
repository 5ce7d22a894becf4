#include "qcbridge/types.hpp"

#include "qcbridge/errors.hpp"

namespace qcbridge {

std::string_view to_string(Boundary b) noexcept {
  return b == Boundary::kPeriodic ? "periodic" : "open";
}

Boundary boundary_from_string(std::string_view text) {
  if (text == "periodic") return Boundary::kPeriodic;
  if (text == "open") return Boundary::kOpen;
  raise(ErrorKind::kValidation, "types", "unknown boundary '" + std::string(text) + "'");
}

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::kQuantumExact: return "quantum-exact";
    case Provenance::kClassicalEnum: return "classical-enum";
    case Provenance::kClassicalTransfer: return "classical-tm";
    case Provenance::kClassicalMc: return "classical-mc";
  }
  return "unknown";
}

bool is_exact(Provenance p) noexcept { return p != Provenance::kClassicalMc; }

}  // namespace qcbridge
