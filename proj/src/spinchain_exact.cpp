#include "qcbridge/spinchain_exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "qcbridge/errors.hpp"

namespace qcbridge {
namespace {

constexpr const char* kModule = "spinchain_exact";
constexpr double kDegeneracyTol = 1e-10;

using cd = std::complex<double>;

void check_site(int site, int sites, Boundary boundary) {
  if (site < 0 || site >= sites) {
    raise(ErrorKind::kSiteOutOfRange, kModule,
          "site " + std::to_string(site) + " outside chain of " + std::to_string(sites));
  }
  if (boundary == Boundary::kOpen && site + 1 >= sites) {
    raise(ErrorKind::kSiteOutOfRange, kModule,
          "site " + std::to_string(site) + " has no right neighbour on an open chain");
  }
}

// Action of a Pauli string on a basis state: P|b> = phase(b) |b ^ flip>.
struct PauliString {
  unsigned flip = 0;
  unsigned zmask = 0;  // sites carrying sz (or the sz part of sy)
  int y_count = 0;

  void add(int site, Pauli p) {
    const unsigned bit = 1u << site;
    switch (p) {
      case Pauli::kI: break;
      case Pauli::kX: flip |= bit; break;
      case Pauli::kZ: zmask |= bit; break;
      case Pauli::kY:
        flip |= bit;
        zmask |= bit;
        ++y_count;
        break;
    }
  }

  // sy|0> = i|1>, sy|1> = -i|0>, i.e. sy = i sx sz acting as i (-1)^b.
  cd phase(unsigned b) const {
    const int parity = std::popcount(b & zmask) & 1;
    cd ph = parity ? cd(-1.0, 0.0) : cd(1.0, 0.0);
    static constexpr cd kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return ph * kIPow[y_count & 3];
  }
};

double expect_string(const QuantumState& state, const PauliString& p) {
  const Eigen::Index dim = state.vectors.rows();
  double total = 0.0;
  for (Eigen::Index k = 0; k < state.vectors.cols(); ++k) {
    const double w = state.weights[static_cast<std::size_t>(k)];
    if (w == 0.0) continue;
    cd acc = 0.0;
    for (Eigen::Index b = 0; b < dim; ++b) {
      const auto ub = static_cast<unsigned>(b);
      acc += std::conj(state.vectors(static_cast<Eigen::Index>(ub ^ p.flip), k)) * p.phase(ub) *
             state.vectors(b, k);
    }
    total += w * acc.real();
  }
  return total;
}

}  // namespace

void QuantumChainSpec::validate() const {
  validate_model();
  if (sites > kMaxExactSites) {
    raise(ErrorKind::kDimensionLimit, kModule,
          "M=" + std::to_string(sites) + " exceeds the dense cap of " +
              std::to_string(kMaxExactSites));
  }
}

void QuantumChainSpec::validate_model() const {
  if (sites < 1) raise(ErrorKind::kValidation, kModule, "chain needs at least one site");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    raise(ErrorKind::kValidation, kModule, "beta must be positive and finite");
  }
  if (!std::isfinite(coupling) || !std::isfinite(field)) {
    raise(ErrorKind::kValidation, kModule, "J and B must be finite");
  }
  if (boundary == Boundary::kPeriodic && sites < 3) {
    raise(ErrorKind::kValidation, kModule,
          "periodic chains need M >= 3 (M=2 would count its single bond twice)");
  }
}

bool HermitianOperator::is_hermitian(double tol) const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Eigen::MatrixXcd QuantumState::density_matrix() const {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(vectors.rows(), vectors.rows());
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    rho.noalias() += weights[static_cast<std::size_t>(k)] * vectors.col(k) * vectors.col(k).adjoint();
  }
  return rho;
}

HermitianOperator build_tfim(const QuantumChainSpec& spec) {
  spec.validate();
  const int m = spec.sites;
  const Eigen::Index dim = Eigen::Index{1} << m;
  const int bonds = spec.boundary == Boundary::kPeriodic ? m : m - 1;

  HermitianOperator h{m, Eigen::MatrixXcd::Zero(dim, dim)};
  for (Eigen::Index b = 0; b < dim; ++b) {
    const auto ub = static_cast<unsigned>(b);
    double diag = 0.0;
    for (int j = 0; j < bonds; ++j) {
      const int k = (j + 1) % m;
      const bool aligned = ((ub >> j) & 1u) == ((ub >> k) & 1u);
      diag -= spec.coupling * (aligned ? 1.0 : -1.0);
    }
    h.matrix(b, b) = diag;
    for (int j = 0; j < m; ++j) {
      h.matrix(static_cast<Eigen::Index>(ub ^ (1u << j)), b) -= spec.field;
    }
  }
  return h;
}

Spectrum diagonalize(const HermitianOperator& h) {
  Spectrum out;
  if (h.matrix.imag().isZero(0.0)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix.real());
    if (solver.info() != Eigen::Success) {
      raise(ErrorKind::kNumeric, kModule,
            "real symmetric eigensolver did not converge (dim " + std::to_string(h.dimension()) + ")");
    }
    out.energies = solver.eigenvalues();
    out.vectors = solver.eigenvectors().cast<cd>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.matrix);
    if (solver.info() != Eigen::Success) {
      raise(ErrorKind::kNumeric, kModule,
            "hermitian eigensolver did not converge (dim " + std::to_string(h.dimension()) + ")");
    }
    out.energies = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
  }
  return out;
}

QuantumState ground_state(const HermitianOperator& h) {
  if (!h.is_hermitian()) raise(ErrorKind::kValidation, kModule, "operator is not Hermitian");
  const Spectrum spec = diagonalize(h);
  const double e0 = spec.energies(0);
  const double tol = kDegeneracyTol * std::max(1.0, std::abs(e0));
  Eigen::Index count = 1;
  while (count < spec.energies.size() && spec.energies(count) - e0 <= tol) ++count;

  QuantumState state;
  state.sites = h.sites;
  state.energy = e0;
  state.beta = std::numeric_limits<double>::infinity();
  state.vectors = spec.vectors.leftCols(count);
  state.weights.assign(static_cast<std::size_t>(count), 1.0 / static_cast<double>(count));
  state.degeneracy = static_cast<int>(count);
  state.degenerate = count > 1;
  state.kind = state.degenerate ? StateKind::kThermal : StateKind::kPure;
  return state;
}

QuantumState thermal_state(const HermitianOperator& h, double beta) {
  if (!(beta > 0.0)) raise(ErrorKind::kValidation, kModule, "beta must be positive");
  if (!h.is_hermitian()) raise(ErrorKind::kValidation, kModule, "operator is not Hermitian");
  const Spectrum spec = diagonalize(h);
  const double e0 = spec.energies(0);

  QuantumState state;
  state.kind = StateKind::kThermal;
  state.sites = h.sites;
  state.energy = e0;
  state.beta = beta;
  state.vectors = spec.vectors;
  state.weights.resize(static_cast<std::size_t>(spec.energies.size()));
  double z = 0.0;
  for (Eigen::Index k = 0; k < spec.energies.size(); ++k) {
    const double w = std::exp(-beta * (spec.energies(k) - e0));
    state.weights[static_cast<std::size_t>(k)] = w;
    z += w;
  }
  for (double& w : state.weights) w /= z;
  return state;
}

QuantumState pure_state(int sites, const Eigen::VectorXcd& vector) {
  if (vector.size() != (Eigen::Index{1} << sites)) {
    raise(ErrorKind::kValidation, kModule, "state vector length does not match 2^M");
  }
  if (std::abs(vector.norm() - 1.0) > 1e-12) {
    raise(ErrorKind::kValidation, kModule, "state vector is not normalized");
  }
  QuantumState state;
  state.sites = sites;
  state.vectors = vector;
  state.weights = {1.0};
  state.beta = std::numeric_limits<double>::infinity();
  return state;
}

int neighbour_of(int site, int sites, Boundary boundary) {
  check_site(site, sites, boundary);
  return (site + 1) % sites;
}

double pauli_expectation(const QuantumState& state, int site_a, Pauli pa, int site_b, Pauli pb) {
  if (site_a < 0 || site_a >= state.sites || site_b >= state.sites || site_a == site_b) {
    raise(ErrorKind::kSiteOutOfRange, kModule, "invalid Pauli string sites");
  }
  PauliString p;
  p.add(site_a, pa);
  if (site_b >= 0) p.add(site_b, pb);
  return expect_string(state, p);
}

CorrelatorSet correlators(const QuantumState& state, int site, Boundary boundary) {
  const int next = neighbour_of(site, state.sites, boundary);

  CorrelatorSet c;
  c.provenance = Provenance::kQuantumExact;
  c.m_x = pauli_expectation(state, site, Pauli::kX);
  c.m_x_next = pauli_expectation(state, next, Pauli::kX);
  c.c_x = pauli_expectation(state, site, Pauli::kX, next, Pauli::kX);
  c.c_y = pauli_expectation(state, site, Pauli::kY, next, Pauli::kY);
  c.c_z = pauli_expectation(state, site, Pauli::kZ, next, Pauli::kZ);

  // Every other two-site Pauli component must vanish for a Z2-symmetric state.
  constexpr Pauli kAll[4] = {Pauli::kI, Pauli::kX, Pauli::kY, Pauli::kZ};
  double residual = 0.0;
  for (Pauli a : kAll) {
    for (Pauli b : kAll) {
      const bool kept = (a == Pauli::kI && b == Pauli::kI) || (a == Pauli::kX && b == Pauli::kI) ||
                        (a == Pauli::kI && b == Pauli::kX) || (a == b);
      if (kept) continue;
      PauliString p;
      p.add(site, a);
      p.add(next, b);
      residual = std::max(residual, std::abs(expect_string(state, p)));
    }
  }
  c.off_pattern_residual = residual;
  return c;
}

TwoSiteDensity two_site_rdm(const QuantumState& state, int site, Boundary boundary) {
  const int next = neighbour_of(site, state.sites, boundary);
  const unsigned bit_a = 1u << site;
  const unsigned bit_b = 1u << next;
  const unsigned dim = 1u << state.sites;
  auto embed = [&](unsigned rest, int local) {
    return rest | ((local & 2) ? bit_a : 0u) | ((local & 1) ? bit_b : 0u);
  };

  TwoSiteDensity out;
  out.source = Provenance::kQuantumExact;
  Eigen::Matrix4cd& rho = out.matrix;
  rho.setZero();
  for (Eigen::Index k = 0; k < state.vectors.cols(); ++k) {
    const double w = state.weights[static_cast<std::size_t>(k)];
    if (w == 0.0) continue;
    const auto v = state.vectors.col(k);
    for (unsigned rest = 0; rest < dim; ++rest) {
      if (rest & (bit_a | bit_b)) continue;
      cd amp[4];
      for (int l = 0; l < 4; ++l) amp[l] = v(static_cast<Eigen::Index>(embed(rest, l)));
      for (int r = 0; r < 4; ++r) {
        for (int s = 0; s < 4; ++s) rho(r, s) += w * amp[r] * std::conj(amp[s]);
      }
    }
  }
  return out;
}

double log_partition_function(const HermitianOperator& h, double beta) {
  const Spectrum spec = diagonalize(h);
  const double e0 = spec.energies(0);
  double z = 0.0;
  for (Eigen::Index k = 0; k < spec.energies.size(); ++k) z += std::exp(-beta * (spec.energies(k) - e0));
  return -beta * e0 + std::log(z);
}

}  // namespace qcbridge
