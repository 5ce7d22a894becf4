#pragma once

// Two-site states from nearest-neighbour correlators and their entanglement.
//
//   rho = 1/4 [ I + m_x sx(x)I + m_x' I(x)sx + c_x sx(x)sx + c_y sy(x)sy + c_z sz(x)sz ]
//
// Whatever produced the correlators (exact diagonalization, transfer matrix,
// Monte Carlo), the same reconstruction and measures apply.

#include <string>

#include <Eigen/Dense>

#include "qcbridge/types.hpp"

namespace qcbridge {

// Cyclic Jacobi for small Hermitian matrices; eigenvalues ascending.
struct HermitianEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
  int sweeps = 0;
};

HermitianEigen jacobi_eigen(const Eigen::MatrixXcd& matrix, double tolerance = 1e-14);

// Propagated eigenvalue uncertainty of rho from correlator standard errors (first order).
double propagated_error(const CorrelatorSet& c);

// PSD tolerance: 1e-9 for exact sources, 3 x propagated error for Monte Carlo.
double psd_tolerance(const CorrelatorSet& c);

TwoSiteDensity rdm_from_correlators(const CorrelatorSet& c);

// Pauli reconstruction without clamping, PSD checks or repair.
Eigen::Matrix4cd pauli_reconstruction(const CorrelatorSet& c);

Eigen::Matrix4cd partial_transpose_second(const Eigen::Matrix4cd& rho);

// Sum of |negative eigenvalues| of the partial transpose (Bell state: 0.5).
double negativity(const TwoSiteDensity& rho);

// Wootters concurrence.
double concurrence(const TwoSiteDensity& rho);

struct EntanglementReport {
  double concurrence = 0.0;
  double negativity = 0.0;
  bool entangled = false;
  bool repair_applied = false;
  Provenance source = Provenance::kQuantumExact;
};

EntanglementReport analyze(const TwoSiteDensity& rho);

std::string to_json(const EntanglementReport& r);

}  // namespace qcbridge
