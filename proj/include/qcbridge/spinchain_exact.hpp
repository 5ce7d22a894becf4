#pragma once

// Dense exact treatment of the transverse-field Ising chain
//
//   H = -J sum_j sz_j sz_{j+1} - B sum_j sx_j
//
// on 2^M states. Site j is bit j of the basis index; a clear bit is sigma^z = +1.
// Everything here is the reference the classical lattice results are judged by.

#include <vector>

#include <Eigen/Dense>

#include "qcbridge/types.hpp"

namespace qcbridge {

inline constexpr int kMaxExactSites = 10;

struct QuantumChainSpec {
  int sites = 2;
  double coupling = 1.0;  // J
  double field = 1.0;     // B
  Boundary boundary = Boundary::kPeriodic;
  double beta = 1.0;

  // Throws kValidation for malformed specs and kDimensionLimit above the dense cap.
  void validate() const;
  // Same checks without the dense cap; used by the lattice mapping.
  void validate_model() const;
};

struct HermitianOperator {
  int sites = 0;
  Eigen::MatrixXcd matrix;

  Eigen::Index dimension() const { return matrix.rows(); }
  bool is_hermitian(double tol = 1e-12) const;
};

enum class StateKind { kPure, kThermal };

// A state stored as an ensemble of orthonormal vectors (columns) with weights.
// A pure state has one column of weight 1. Thermal states and degenerate ground
// spaces keep the full set so no density matrix has to be formed.
struct QuantumState {
  StateKind kind = StateKind::kPure;
  int sites = 0;
  Eigen::MatrixXcd vectors;
  std::vector<double> weights;
  double energy = 0.0;  // lowest eigenvalue of the generating Hamiltonian
  double beta = 0.0;    // +inf for (degenerate) ground states
  bool degenerate = false;
  int degeneracy = 1;

  Eigen::MatrixXcd density_matrix() const;
};

struct Spectrum {
  Eigen::VectorXd energies;  // ascending
  Eigen::MatrixXcd vectors;
};

HermitianOperator build_tfim(const QuantumChainSpec& spec);
Spectrum diagonalize(const HermitianOperator& h);

// Lowest eigenvector, or the equal mixture over the ground space when the
// lowest levels agree within 1e-10 (flagged via `degenerate`).
QuantumState ground_state(const HermitianOperator& h);
QuantumState thermal_state(const HermitianOperator& h, double beta);

// Wraps a normalized vector as a pure state, e.g. for hand-built fixtures.
QuantumState pure_state(int sites, const Eigen::VectorXcd& vector);

// Nearest-neighbour pair (i, i+1) of the chain. Periodic chains wrap.
int neighbour_of(int site, int sites, Boundary boundary);

enum class Pauli { kI, kX, kY, kZ };

// <P_a Q_b> for Pauli operators on sites a != b (or a single operator with b < 0).
double pauli_expectation(const QuantumState& state, int site_a, Pauli pa, int site_b = -1,
                         Pauli pb = Pauli::kI);

CorrelatorSet correlators(const QuantumState& state, int site, Boundary boundary);
TwoSiteDensity two_site_rdm(const QuantumState& state, int site, Boundary boundary);

double log_partition_function(const HermitianOperator& h, double beta);

}  // namespace qcbridge
