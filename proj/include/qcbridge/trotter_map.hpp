#pragma once

// Quantum -> classical mapping.
//
// A transverse-field Ising chain of M sites at inverse temperature beta becomes
// an anisotropic classical Ising lattice of M columns and n Trotter rows:
//
//   Z_n = exp(log_prefactor) * sum_{sigma} exp( sum_{j,k} (K/n) s_{j,k} s_{j+1,k}
//                                              + K_n s_{j,k} s_{j,k+1} )
//
// with K = beta*J, gamma = beta*B, K_n = 1/2 ln coth(gamma/n) and
// log_prefactor = M (n/2) ln(1/2 sinh(2 gamma/n)). Rows are periodic (trace).
//
// A single driven qubit H = E sz + Delta sx maps onto a classical chain whose
// transfer elements are solved exactly per slice (see solve_transfer_element).

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qcbridge/spinchain_exact.hpp"
#include "qcbridge/types.hpp"

namespace qcbridge {

// The quantum chain a lattice was mapped from. Needed to turn log Z into a free
// energy and to label outputs.
struct LatticeOrigin {
  int sites = 0;
  double coupling = 0.0;
  double field = 0.0;
  double beta = 0.0;
};

struct ClassicalLatticeSpec {
  int columns = 1;  // M, spatial
  int rows = 1;     // n, Trotter slices
  std::complex<double> spatial_coupling{0.0, 0.0};
  std::complex<double> temporal_coupling{0.0, 0.0};
  std::complex<double> log_prefactor{0.0, 0.0};
  Boundary boundary_space = Boundary::kPeriodic;
  std::optional<LatticeOrigin> origin;

  long spin_count() const { return static_cast<long>(columns) * rows; }
  long bond_count() const;
  bool is_real() const;
  void validate() const;
};

// Numerically stable scalar pieces of the mapping, exposed for tests and docs.
double half_log_coth(double x);         // 1/2 ln coth(x), x > 0
double log_half_sinh_double(double x);  // ln(1/2 sinh(2x)), x > 0

ClassicalLatticeSpec map_tfim(const QuantumChainSpec& spec, int trotter_rows);

enum class InsertionKind { kZ, kXBond, kYSpinBond };

// A local modification of the Boltzmann weight at column `column`, row `slice`:
//   kZ         multiply by s_{j,l}
//   kXBond     multiply by exp(-strength s_{j,l} s_{j,l+1})
//   kYSpinBond as kXBond, times s_{j,l+1}; each pair of these adds a factor -1
struct InsertionSpec {
  InsertionKind kind = InsertionKind::kZ;
  int column = 0;
  int slice = 0;
  double strength = 0.0;

  bool operator==(const InsertionSpec&) const = default;
};

enum class ObservableKind { kSigmaX, kSigmaZ, kXX, kYY, kZZ };

struct Observable {
  ObservableKind kind = ObservableKind::kSigmaZ;
  int first = 0;
  int second = -1;  // unused for single-site observables
};

std::vector<InsertionSpec> insertion_for(const ClassicalLatticeSpec& lattice, const Observable& obs,
                                         int slice = 0);

// Throws kValidation unless the list references in-range sites/slices and
// carries an even number of kYSpinBond entries.
void validate_insertions(const ClassicalLatticeSpec& lattice, const std::vector<InsertionSpec>& ins);

// Exact per-slice constants of <s'| exp(-epsilon H) |s> = A exp(h s s' + K (s + s'))
// for H = E sz + Delta sx. `coupling` is h, `field` is K, `amplitude` is A.
struct TransferElementConstants {
  std::complex<double> amplitude;
  std::complex<double> log_amplitude;
  std::complex<double> coupling;
  std::complex<double> field;
  std::complex<double> epsilon;

  // Multiples of 2*pi*i separating the stored logarithm from the principal
  // logarithm of the matching closed-form ratio: ln(ad/b^2)/4, ln(a/d)/4, ln(a d b^2)/4.
  int coupling_branch = 0;
  int field_branch = 0;
  int amplitude_branch = 0;

  // s, s_next in {+1, -1}.
  std::complex<double> element(int s_next, int s) const;
  Eigen::Matrix2cd matrix() const;
};

TransferElementConstants solve_transfer_element(double energy, double tunnelling,
                                                std::complex<double> epsilon);

// exp(-epsilon H) for the qubit, by diagonalizing the 2x2 Hamiltonian.
Eigen::Matrix2cd qubit_exponential(double energy, double tunnelling, std::complex<double> epsilon);

// Sum over classical chain paths with both ends pinned, for m slices of
// exp(-total_epsilon H / m). Entry (a, b) is the path sum from s_1 = b to s_m = a
// (index 0 is s = +1), i.e. <a| exp(-total_epsilon H) |b>.
Eigen::Matrix2cd qubit_chain_contraction(double energy, double tunnelling,
                                         std::complex<double> total_epsilon, int slices);

// Real time: total_epsilon = i t.
Eigen::Matrix2cd qubit_chain_propagator(double energy, double tunnelling, double time, int slices);

// Imaginary time (it -> beta): periodic chain, i.e. the classical partition function.
double qubit_chain_partition(double energy, double tunnelling, double beta, int slices);

}  // namespace qcbridge
