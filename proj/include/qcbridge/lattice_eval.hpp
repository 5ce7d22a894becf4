#pragma once

// Exact evaluation of mapped classical lattices: brute-force enumeration for
// small lattices and row-to-row transfer-matrix contraction for up to 12
// columns. Results exclude the lattice's log_prefactor unless stated.

#include <vector>

#include "qcbridge/trotter_map.hpp"
#include "qcbridge/types.hpp"

namespace qcbridge {

inline constexpr int kDefaultEnumerationSpins = 24;
inline constexpr int kMaxEnumerationSpins = 28;
inline constexpr int kMaxTransferColumns = 12;

// 24 by default; BRIDGE_MAX_SPINS overrides, clamped to [1, 28].
int enumeration_spin_cap();

enum class EvalMethod { kEnumeration, kTransferMatrix };

const char* to_string(EvalMethod method) noexcept;
Provenance provenance_of(EvalMethod method) noexcept;

struct LatticeObservableResult {
  double value = 0.0;
  double log_partition = 0.0;
  EvalMethod method = EvalMethod::kTransferMatrix;
};

double enumerate_log_z(const ClassicalLatticeSpec& lattice);
double transfer_log_z(const ClassicalLatticeSpec& lattice);
double log_z(const ClassicalLatticeSpec& lattice, EvalMethod method);

// <W> over the Boltzmann weight, W the product of the insertion factors.
LatticeObservableResult expectation(const ClassicalLatticeSpec& lattice,
                                    const std::vector<InsertionSpec>& insertions, EvalMethod method);

// Several insertion lists against one partition function.
std::vector<double> expectations(const ClassicalLatticeSpec& lattice,
                                 const std::vector<std::vector<InsertionSpec>>& lists,
                                 EvalMethod method, double* log_partition = nullptr);

// -(1/beta)(log_prefactor + log Z_lattice); beta comes from lattice.origin.
double free_energy(const ClassicalLatticeSpec& lattice, EvalMethod method = EvalMethod::kTransferMatrix);

// Insertion lists for m_x(i), m_x(i+1), c_x, c_y, c_z in CorrelatorSet order.
std::vector<std::vector<InsertionSpec>> correlator_insertions(const ClassicalLatticeSpec& lattice,
                                                              int site, int slice = 0);

CorrelatorSet lattice_correlators(const ClassicalLatticeSpec& lattice, int site, EvalMethod method,
                                  int slice = 0);

}  // namespace qcbridge
