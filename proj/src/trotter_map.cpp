#include "qcbridge/trotter_map.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qcbridge/errors.hpp"

namespace qcbridge {
namespace {

constexpr const char* kModule = "trotter_map";
using cd = std::complex<double>;

int branch_index(double stored_imag, double principal_arg) {
  return static_cast<int>(std::lround((stored_imag - principal_arg) / (2.0 * std::numbers::pi)));
}

bool adjacent(int a, int b, int columns, Boundary boundary) {
  if (a + 1 == b || b + 1 == a) return true;
  if (boundary == Boundary::kPeriodic && columns > 2) {
    return (a + 1) % columns == b || (b + 1) % columns == a;
  }
  return false;
}

}  // namespace

long ClassicalLatticeSpec::bond_count() const {
  const long spatial = boundary_space == Boundary::kPeriodic
                           ? static_cast<long>(columns) * rows
                           : static_cast<long>(columns - 1) * rows;
  return spatial + spin_count();
}

bool ClassicalLatticeSpec::is_real() const {
  return spatial_coupling.imag() == 0.0 && temporal_coupling.imag() == 0.0 &&
         log_prefactor.imag() == 0.0;
}

void ClassicalLatticeSpec::validate() const {
  if (columns < 1 || rows < 1) {
    raise(ErrorKind::kValidation, kModule, "lattice needs at least one column and one row");
  }
  auto finite = [](cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  if (!finite(spatial_coupling) || !finite(temporal_coupling) || !finite(log_prefactor)) {
    raise(ErrorKind::kValidation, kModule, "lattice couplings must be finite");
  }
}

double half_log_coth(double x) {
  // coth x = 1 + 2 / (e^{2x} - 1)
  return 0.5 * std::log1p(2.0 / std::expm1(2.0 * x));
}

double log_half_sinh_double(double x) {
  if (x < 1.0) return std::log(0.5 * std::sinh(2.0 * x));
  return 2.0 * x + std::log1p(-std::exp(-4.0 * x)) - std::log(4.0);
}

ClassicalLatticeSpec map_tfim(const QuantumChainSpec& spec, int trotter_rows) {
  spec.validate_model();
  if (trotter_rows < 1) raise(ErrorKind::kValidation, kModule, "Trotter number must be >= 1");
  if (spec.field == 0.0) {
    raise(ErrorKind::kDegenerateMapping, kModule,
          "B = 0 decouples the Trotter rows (K_n is infinite); evaluate the classical chain directly");
  }
  if (spec.field < 0.0) {
    raise(ErrorKind::kValidation, kModule,
          "B must be positive; the sign of B is a gauge choice (conjugate by prod_j sz_j)");
  }

  const double n = trotter_rows;
  const double gamma = spec.beta * spec.field;
  const double k = spec.beta * spec.coupling;

  ClassicalLatticeSpec lattice;
  lattice.columns = spec.sites;
  lattice.rows = trotter_rows;
  lattice.spatial_coupling = k / n;
  lattice.temporal_coupling = half_log_coth(gamma / n);
  lattice.log_prefactor = spec.sites * (n / 2.0) * log_half_sinh_double(gamma / n);
  lattice.boundary_space = spec.boundary;
  lattice.origin = LatticeOrigin{spec.sites, spec.coupling, spec.field, spec.beta};
  return lattice;
}

std::vector<InsertionSpec> insertion_for(const ClassicalLatticeSpec& lattice, const Observable& obs,
                                         int slice) {
  lattice.validate();
  if (!lattice.is_real()) {
    raise(ErrorKind::kSignProblem, kModule, "insertion estimators need real couplings");
  }
  auto check_column = [&](int j) {
    if (j < 0 || j >= lattice.columns) {
      raise(ErrorKind::kSiteOutOfRange, kModule,
            "site " + std::to_string(j) + " outside lattice of " + std::to_string(lattice.columns) +
                " columns");
    }
  };
  if (slice < 0 || slice >= lattice.rows) {
    raise(ErrorKind::kSiteOutOfRange, kModule, "slice " + std::to_string(slice) + " out of range");
  }
  check_column(obs.first);
  const bool pair = obs.kind == ObservableKind::kXX || obs.kind == ObservableKind::kYY ||
                    obs.kind == ObservableKind::kZZ;
  if (pair) {
    check_column(obs.second);
    if (obs.first == obs.second) {
      raise(ErrorKind::kUnsupportedObservable, kModule, "two-point observables need distinct sites");
    }
  }

  const double strength = 2.0 * lattice.temporal_coupling.real();
  switch (obs.kind) {
    case ObservableKind::kSigmaZ:
      return {{InsertionKind::kZ, obs.first, slice, 0.0}};
    case ObservableKind::kSigmaX:
      return {{InsertionKind::kXBond, obs.first, slice, strength}};
    case ObservableKind::kXX:
      return {{InsertionKind::kXBond, obs.first, slice, strength},
              {InsertionKind::kXBond, obs.second, slice, strength}};
    case ObservableKind::kZZ:
      return {{InsertionKind::kZ, obs.first, slice, 0.0}, {InsertionKind::kZ, obs.second, slice, 0.0}};
    case ObservableKind::kYY:
      if (!adjacent(obs.first, obs.second, lattice.columns, lattice.boundary_space)) {
        raise(ErrorKind::kUnsupportedObservable, kModule,
              "sy sy estimator is only provided for adjacent sites");
      }
      return {{InsertionKind::kYSpinBond, obs.first, slice, strength},
              {InsertionKind::kYSpinBond, obs.second, slice, strength}};
  }
  raise(ErrorKind::kUnsupportedObservable, kModule, "unknown observable");
}

void validate_insertions(const ClassicalLatticeSpec& lattice, const std::vector<InsertionSpec>& ins) {
  int y_count = 0;
  for (const auto& i : ins) {
    if (i.column < 0 || i.column >= lattice.columns || i.slice < 0 || i.slice >= lattice.rows) {
      raise(ErrorKind::kSiteOutOfRange, kModule,
            "insertion at (" + std::to_string(i.column) + ", " + std::to_string(i.slice) +
                ") is outside the " + std::to_string(lattice.columns) + "x" +
                std::to_string(lattice.rows) + " lattice");
    }
    if (!std::isfinite(i.strength)) raise(ErrorKind::kValidation, kModule, "non-finite insertion strength");
    if (i.kind == InsertionKind::kYSpinBond) ++y_count;
  }
  if (y_count % 2 != 0) {
    raise(ErrorKind::kUnsupportedObservable, kModule,
          "YSpinBond insertions only come in pairs (odd count has an imaginary weight)");
  }
}

cd TransferElementConstants::element(int s_next, int s) const {
  return std::exp(log_amplitude + coupling * static_cast<double>(s * s_next) +
                  field * static_cast<double>(s + s_next));
}

Eigen::Matrix2cd TransferElementConstants::matrix() const {
  Eigen::Matrix2cd t;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) t(r, c) = element(r == 0 ? 1 : -1, c == 0 ? 1 : -1);
  }
  return t;
}

TransferElementConstants solve_transfer_element(double energy, double tunnelling, cd epsilon) {
  if (tunnelling == 0.0) {
    raise(ErrorKind::kSingularMapping, kModule,
          "Delta = 0 makes the off-diagonal element vanish (h diverges)");
  }
  // exp(-eps H) = cosh(eps w) I - sinh(eps w)/w H with w^2 = E^2 + Delta^2.
  const double w = std::hypot(energy, tunnelling);
  const cd c = std::cosh(epsilon * w);
  const cd s = std::sinh(epsilon * w) / w;
  const cd a = c - s * energy;
  const cd d = c + s * energy;
  const cd b = -s * tunnelling;
  if (a == 0.0 || d == 0.0 || b == 0.0) {
    raise(ErrorKind::kSingularMapping, kModule, "a transfer element vanishes for this time step");
  }

  // Signed zeros in the imaginary part would flip the principal branch of a
  // negative real element; normalise them so the cut is taken from above.
  const auto principal_log = [](cd z) { return std::log(cd(z.real(), z.imag() + 0.0)); };
  const cd la = principal_log(a);
  const cd ld = principal_log(d);
  const cd lb = principal_log(b);

  TransferElementConstants out;
  out.epsilon = epsilon;
  out.coupling = (la + ld - 2.0 * lb) / 4.0;
  out.field = (la - ld) / 4.0;
  out.log_amplitude = (la + ld + 2.0 * lb) / 4.0;
  out.amplitude = std::exp(out.log_amplitude);
  out.coupling_branch = branch_index((la + ld - 2.0 * lb).imag(), std::arg(a * d / (b * b)));
  out.field_branch = branch_index((la - ld).imag(), std::arg(a / d));
  out.amplitude_branch = branch_index((la + ld + 2.0 * lb).imag(), std::arg(a * d * b * b));
  return out;
}

Eigen::Matrix2cd qubit_exponential(double energy, double tunnelling, cd epsilon) {
  Eigen::Matrix2d h;
  h << energy, tunnelling, tunnelling, -energy;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(h);
  const Eigen::Matrix2cd v = solver.eigenvectors().cast<cd>();
  Eigen::Matrix2cd diag = Eigen::Matrix2cd::Zero();
  for (int k = 0; k < 2; ++k) diag(k, k) = std::exp(-epsilon * solver.eigenvalues()(k));
  return v * diag * v.adjoint();
}

Eigen::Matrix2cd qubit_chain_contraction(double energy, double tunnelling, cd total_epsilon,
                                         int slices) {
  if (slices < 1) raise(ErrorKind::kValidation, kModule, "slice count must be >= 1");
  const auto constants = solve_transfer_element(energy, tunnelling, total_epsilon / double(slices));
  const Eigen::Matrix2cd t = constants.matrix();
  // Summing the interior spins of the chain one at a time.
  Eigen::Matrix2cd path = t;
  for (int k = 1; k < slices; ++k) path = t * path;
  return path;
}

Eigen::Matrix2cd qubit_chain_propagator(double energy, double tunnelling, double time, int slices) {
  return qubit_chain_contraction(energy, tunnelling, cd(0.0, time), slices);
}

double qubit_chain_partition(double energy, double tunnelling, double beta, int slices) {
  if (!(beta > 0.0)) raise(ErrorKind::kValidation, kModule, "beta must be positive");
  return qubit_chain_contraction(energy, tunnelling, cd(beta, 0.0), slices).trace().real();
}

}  // namespace qcbridge
