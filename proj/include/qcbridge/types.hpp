#pragma once

#include <array>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qcbridge {

enum class Boundary { kPeriodic, kOpen };

std::string_view to_string(Boundary b) noexcept;
Boundary boundary_from_string(std::string_view text);

// Where a set of nearest-neighbour correlators came from.
enum class Provenance { kQuantumExact, kClassicalEnum, kClassicalTransfer, kClassicalMc };

std::string_view to_string(Provenance p) noexcept;
bool is_exact(Provenance p) noexcept;

// Nearest-neighbour correlators of a Z2-symmetric chain state, sites (i, i+1).
//
// m_x and m_x_next coincide for translation-invariant (periodic) chains; they
// are kept separately so open chains reconstruct their two-site state exactly.
struct CorrelatorSet {
  double m_x = 0.0;
  double m_x_next = 0.0;
  double c_x = 0.0;
  double c_y = 0.0;
  double c_z = 0.0;
  Provenance provenance = Provenance::kQuantumExact;

  // Order: m_x, m_x_next, c_x, c_y, c_z. All zero unless provenance is Monte Carlo.
  std::array<double, 5> std_err{};

  // Largest |<P_i Q_{i+1}>| over the two-site Pauli components that a
  // Z2-symmetric state must have zero. Only meaningful for exact quantum input.
  double off_pattern_residual = 0.0;

  std::array<double, 5> values() const { return {m_x, m_x_next, c_x, c_y, c_z}; }
};

inline constexpr std::array<const char*, 5> kCorrelatorNames = {"m_x", "m_x_next", "c_x", "c_y",
                                                                  "c_z"};

// Two-spin reduced state in the basis |s_i s_{i+1}>, index 2*b_i + b_{i+1},
// with bit 0 meaning sigma^z = +1.
struct TwoSiteDensity {
  Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();
  Provenance source = Provenance::kQuantumExact;
  bool repair_applied = false;
  bool clamped = false;
};

}  // namespace qcbridge
