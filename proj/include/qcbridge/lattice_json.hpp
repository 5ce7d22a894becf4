#pragma once

// Canonical JSON form of a ClassicalLatticeSpec. Keys appear in a fixed order
// and numbers are printed with 17 significant digits, so identical lattices
// serialize to identical bytes. Complex couplings are written as {"re": .., "im": ..}.

#include <string>
#include <string_view>

#include "qcbridge/trotter_map.hpp"

namespace qcbridge {

inline constexpr int kLatticeSchemaVersion = 1;

std::string lattice_to_json(const ClassicalLatticeSpec& lattice);
ClassicalLatticeSpec lattice_from_json(std::string_view text);

}  // namespace qcbridge
