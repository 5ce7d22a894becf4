#include "qcbridge/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <json.hpp>

#include "qcbridge/errors.hpp"
#include "qcbridge/format.hpp"

namespace qcbridge {
namespace {

constexpr const char* kModule = "entanglement";
// Eigenvalue magnitudes below this are treated as exact zeros by the measures.
constexpr double kMeasureZero = 1e-12;

using cd = std::complex<double>;

Eigen::Matrix2cd pauli(char which) {
  Eigen::Matrix2cd p;
  switch (which) {
    case 'x': p << 0, 1, 1, 0; break;
    case 'y': p << 0, cd(0, -1), cd(0, 1), 0; break;
    case 'z': p << 1, 0, 0, -1; break;
    default: p.setIdentity(); break;
  }
  return p;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
  Eigen::Matrix4cd out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  }
  return out;
}

double clamp_entry(double value, double std_err, bool& clamped) {
  if (std::abs(value) <= 1.0) return value;
  const double excess = std::abs(value) - 1.0;
  if (std_err > 0.0 && excess < 3.0 * std_err) {
    clamped = true;
    return std::copysign(1.0, value);
  }
  raise(ErrorKind::kInconsistentCorrelators, kModule,
        "correlator " + std::to_string(value) + " lies outside [-1, 1]");
}

}  // namespace

HermitianEigen jacobi_eigen(const Eigen::MatrixXcd& matrix, double tolerance) {
  const Eigen::Index n = matrix.rows();
  Eigen::MatrixXcd a = 0.5 * (matrix + matrix.adjoint());
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Identity(n, n);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());

  HermitianEigen out;
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    }
    if (off <= tolerance * scale) {
      out.sweeps = sweep;
      break;
    }
    if (sweep == 63) raise(ErrorKind::kNumeric, kModule, "Jacobi iteration did not converge");

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        // Phase-rotate so the pivot is real, then a real Givens rotation.
        const cd phase = a(p, q) / r;
        const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cd gqp = -s * std::conj(phase);
        const cd gqq = c * std::conj(phase);
        // a <- a G
        for (Eigen::Index k = 0; k < n; ++k) {
          const cd ap = a(k, p);
          const cd aq = a(k, q);
          a(k, p) = ap * c + aq * gqp;
          a(k, q) = ap * s + aq * gqq;
          const cd vp = v(k, p);
          const cd vq = v(k, q);
          v(k, p) = vp * c + vq * gqp;
          v(k, q) = vp * s + vq * gqq;
        }
        // a <- G^dagger a
        for (Eigen::Index k = 0; k < n; ++k) {
          const cd ap = a(p, k);
          const cd aq = a(q, k);
          a(p, k) = c * ap + std::conj(gqp) * aq;
          a(q, k) = s * ap + std::conj(gqq) * aq;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

double propagated_error(const CorrelatorSet& c) {
  const auto& e = c.std_err;
  return 0.25 * (e[0] + e[1] + e[2] + e[3] + e[4]);
}

double psd_tolerance(const CorrelatorSet& c) {
  return is_exact(c.provenance) ? 1e-9 : 3.0 * propagated_error(c);
}

Eigen::Matrix4cd pauli_reconstruction(const CorrelatorSet& c) {
  const auto id = pauli('i');
  const auto x = pauli('x');
  const auto y = pauli('y');
  const auto z = pauli('z');
  return 0.25 * (kron(id, id) + c.m_x * kron(x, id) + c.m_x_next * kron(id, x) + c.c_x * kron(x, x) +
                 c.c_y * kron(y, y) + c.c_z * kron(z, z));
}

TwoSiteDensity rdm_from_correlators(const CorrelatorSet& c) {
  CorrelatorSet clean = c;
  bool clamped = false;
  clean.m_x = clamp_entry(c.m_x, c.std_err[0], clamped);
  clean.m_x_next = clamp_entry(c.m_x_next, c.std_err[1], clamped);
  clean.c_x = clamp_entry(c.c_x, c.std_err[2], clamped);
  clean.c_y = clamp_entry(c.c_y, c.std_err[3], clamped);
  clean.c_z = clamp_entry(c.c_z, c.std_err[4], clamped);

  TwoSiteDensity out;
  out.source = c.provenance;
  out.clamped = clamped;
  out.matrix = pauli_reconstruction(clean);

  const auto eig = jacobi_eigen(out.matrix);
  const double lowest = eig.values(0);
  const double tol = psd_tolerance(c);
  if (lowest < -tol) {
    raise(ErrorKind::kInconsistentCorrelators, kModule,
          "reconstructed state has eigenvalue " + format_double17(lowest) + " below -" +
              format_double17(tol) + " (estimator bias or too small a Trotter number)");
  }
  if (lowest < 0.0) {
    Eigen::Vector4d clipped;
    for (int k = 0; k < 4; ++k) clipped(k) = std::max(0.0, eig.values(k));
    clipped /= clipped.sum();
    out.matrix = eig.vectors * clipped.cast<cd>().asDiagonal() * eig.vectors.adjoint();
    out.repair_applied = true;
  }
  return out;
}

Eigen::Matrix4cd partial_transpose_second(const Eigen::Matrix4cd& rho) {
  Eigen::Matrix4cd pt;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      for (int ap = 0; ap < 2; ++ap) {
        for (int bp = 0; bp < 2; ++bp) pt(2 * a + b, 2 * ap + bp) = rho(2 * a + bp, 2 * ap + b);
      }
    }
  }
  return pt;
}

double negativity(const TwoSiteDensity& rho) {
  const auto eig = jacobi_eigen(partial_transpose_second(rho.matrix));
  double total = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) < -kMeasureZero) total -= eig.values(k);
  }
  return total;
}

double concurrence(const TwoSiteDensity& rho) {
  // Eigenvalues of rho (sy sy) rho* (sy sy) equal those of the Hermitian
  // sqrt(rho) (sy sy) rho* (sy sy) sqrt(rho).
  const Eigen::Matrix4cd yy = kron(pauli('y'), pauli('y'));
  const auto eig = jacobi_eigen(rho.matrix);
  Eigen::Vector4d roots;
  for (int k = 0; k < 4; ++k) roots(k) = std::sqrt(std::max(0.0, eig.values(k)));
  const Eigen::Matrix4cd sqrt_rho = eig.vectors * roots.cast<cd>().asDiagonal() * eig.vectors.adjoint();
  const Eigen::Matrix4cd flipped = yy * rho.matrix.conjugate() * yy;
  const auto r = jacobi_eigen(sqrt_rho * flipped * sqrt_rho);
  std::array<double, 4> lam{};
  for (int k = 0; k < 4; ++k) lam[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, r.values(k)));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  const double c = lam[0] - lam[1] - lam[2] - lam[3];
  return c > kMeasureZero ? c : 0.0;
}

EntanglementReport analyze(const TwoSiteDensity& rho) {
  EntanglementReport r;
  r.concurrence = concurrence(rho);
  r.negativity = negativity(rho);
  r.entangled = r.negativity > 0.0;
  r.repair_applied = rho.repair_applied;
  r.source = rho.source;
  return r;
}

std::string to_json(const EntanglementReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "qcbridge.entanglement";
  j["schema_version"] = 1;
  j["concurrence"] = r.concurrence;
  j["negativity"] = r.negativity;
  j["entangled"] = r.entangled;
  j["repair_applied"] = r.repair_applied;
  j["source"] = std::string(to_string(r.source));
  return j.dump(2) + "\n";
}

}  // namespace qcbridge
