#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "oracles.hpp"
#include "qcbridge/entanglement.hpp"
#include "qcbridge/errors.hpp"
#include "qcbridge/spinchain_exact.hpp"

using namespace qcbridge;
using cd = std::complex<double>;

namespace {

CorrelatorSet make_set(double mx, double cx, double cy, double cz,
                       Provenance p = Provenance::kQuantumExact) {
  CorrelatorSet c;
  c.m_x = mx;
  c.m_x_next = mx;
  c.c_x = cx;
  c.c_y = cy;
  c.c_z = cz;
  c.provenance = p;
  return c;
}

TwoSiteDensity wrap(const Eigen::Matrix4cd& m) {
  TwoSiteDensity d;
  d.matrix = m;
  return d;
}

Eigen::Matrix4cd projector(const Eigen::Vector4cd& v) { return v * v.adjoint(); }

Eigen::Matrix4cd werner(double p) {
  Eigen::Vector4cd bell(1, 0, 0, 1);
  bell /= std::sqrt(2.0);
  return p * projector(bell) + (1 - p) * Eigen::Matrix4cd::Identity() / 4.0;
}

Eigen::Matrix4cd random_density(std::mt19937_64& gen, int rank) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(4, rank);
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < rank; ++k) a(i, k) = cd(g(gen), g(gen));
  }
  Eigen::Matrix4cd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

}  // namespace

TEST_CASE("Jacobi eigensolver matches Eigen on random Hermitian matrices") {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> g;
  for (int dim : {2, 3, 4, 6}) {
    for (int trial = 0; trial < 20; ++trial) {
      Eigen::MatrixXcd a(dim, dim);
      for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) a(i, j) = cd(g(gen), g(gen));
      }
      const Eigen::MatrixXcd h = a + a.adjoint();
      const auto mine = jacobi_eigen(h);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ref(h);
      CHECK((mine.values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::MatrixXcd recon = mine.vectors * mine.values.asDiagonal() * mine.vectors.adjoint();
      CHECK((recon - h).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((mine.vectors.adjoint() * mine.vectors - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff() <
            1e-12);
      for (Eigen::Index i = 1; i < dim; ++i) CHECK(mine.values(i - 1) <= mine.values(i));
    }
  }
  const auto diag = jacobi_eigen(Eigen::Matrix2cd(Eigen::Vector2cd(3.0, -1.0).asDiagonal()));
  CHECK(diag.values(0) == -1.0);
  CHECK(diag.sweeps <= 1);
}

TEST_CASE("reconstruction examples") {
  const auto mixed = rdm_from_correlators(make_set(0, 0, 0, 0));
  CHECK((mixed.matrix - Eigen::Matrix4cd::Identity() / 4.0).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(concurrence(mixed) == 0.0);
  CHECK(negativity(mixed) == 0.0);
  CHECK_FALSE(mixed.repair_applied);

  const auto plus = rdm_from_correlators(make_set(1, 1, 0, 0));
  Eigen::Vector4cd pp(0.5, 0.5, 0.5, 0.5);
  CHECK((plus.matrix - projector(pp)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(negativity(plus) == 0.0);
  CHECK(concurrence(plus) == 0.0);

  const auto bell = rdm_from_correlators(make_set(0, 1, -1, 1));
  Eigen::Vector4cd b(1, 0, 0, 1);
  CHECK((bell.matrix - projector(b) / 2.0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(concurrence(bell) - 1.0) < 1e-12);
  CHECK(std::abs(negativity(bell) - 0.5) < 1e-12);
  const auto report = analyze(bell);
  CHECK(report.entangled);
  CHECK(report.source == Provenance::kQuantumExact);
}

TEST_CASE("partial transpose of the Bell state") {
  Eigen::Vector4cd b(1, 0, 0, 1);
  const auto pt = partial_transpose_second(projector(b) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(pt);
  CHECK(std::abs(es.eigenvalues()(0) + 0.5) < 1e-12);
  for (int i = 1; i < 4; ++i) CHECK(std::abs(es.eigenvalues()(i) - 0.5) < 1e-12);
  CHECK((partial_transpose_second(pt) - projector(b) / 2.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Werner family") {
  for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.8, 1.0}) {
    const auto rho = wrap(werner(p));
    CHECK(std::abs(concurrence(rho) - std::max(0.0, (3 * p - 1) / 2)) < 1e-12);
    CHECK(std::abs(negativity(rho) - std::max(0.0, (3 * p - 1) / 4)) < 1e-12);
  }
  const auto edge = wrap(werner(1.0 / 3.0));
  CHECK(concurrence(edge) == 0.0);
  CHECK(negativity(edge) == 0.0);
  CHECK_FALSE(analyze(edge).entangled);
}

TEST_CASE("concurrence agrees with an independent Wootters computation") {
  // Spin-flipped rho~ = (sy x sy) rho* (sy x sy); C from the non-Hermitian product's eigenvalues.
  const Eigen::Matrix4cd yy = oracle::kron(oracle::pauli('y'), oracle::pauli('y'));
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Matrix4cd rho = random_density(gen, 1 + trial % 4);
    const Eigen::Matrix4cd r = rho * yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r);
    std::array<double, 4> l{};
    for (int i = 0; i < 4; ++i) l[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
    std::sort(l.rbegin(), l.rend());
    const double want = std::max(0.0, l[0] - l[1] - l[2] - l[3]);
    CHECK(std::abs(concurrence(wrap(rho)) - want) < 1e-7);
  }
}

TEST_CASE("property: round trip through correlators reproduces the exact two-site state") {
  for (int m : {3, 4, 6, 8}) {
    for (double ratio : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      for (double beta : {1.0, 8.0, 20.0}) {
        const QuantumChainSpec q{m, ratio, 1.0, Boundary::kPeriodic, beta};
        const auto state = thermal_state(build_tfim(q), beta);
        const auto c = correlators(state, 0, q.boundary);
        const auto rho = rdm_from_correlators(c);
        const auto direct = two_site_rdm(state, 0, q.boundary);
        CAPTURE(m);
        CAPTURE(ratio);
        CAPTURE(beta);
        CHECK((rho.matrix - direct.matrix).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(std::abs(rho.matrix.trace().real() - 1.0) < 1e-10);
        CHECK((rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(rho.source == Provenance::kQuantumExact);
      }
    }
  }
  // Open chain, middle bond: the two magnetizations differ.
  const QuantumChainSpec open{5, 1.0, 0.7, Boundary::kOpen, 3.0};
  const auto s = thermal_state(build_tfim(open), 3.0);
  const auto c = correlators(s, 0, open.boundary);
  CHECK(c.m_x != doctest::Approx(c.m_x_next));
  CHECK((rdm_from_correlators(c).matrix - two_site_rdm(s, 0, open.boundary).matrix).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("property: negativity and concurrence agree on entanglement") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto rho = wrap(random_density(gen, 1 + trial % 4));
    const auto r = analyze(rho);
    CHECK(r.entangled == (r.negativity > 0.0));
    CHECK(r.entangled == (r.concurrence > 0.0));
    CHECK(r.concurrence <= 1.0 + 1e-12);
  }
  for (double ratio : {0.25, 1.0, 4.0}) {
    const QuantumChainSpec q{6, ratio, 1.0, Boundary::kPeriodic, 8.0};
    const auto r = analyze(rdm_from_correlators(correlators(thermal_state(build_tfim(q), 8.0), 0, q.boundary)));
    CHECK(r.entangled == (r.concurrence > 0.0));
  }
}

TEST_CASE("property: mixing with the identity never increases entanglement") {
  std::mt19937_64 gen(12);
  std::vector<Eigen::Matrix4cd> states{werner(0.9)};
  for (int k = 0; k < 10; ++k) states.push_back(random_density(gen, 1 + k % 3));
  for (const auto& rho : states) {
    double last_c = 1e9, last_n = 1e9;
    for (int step = 0; step <= 10; ++step) {
      const double q = step / 10.0;
      const auto mixed = wrap((1 - q) * rho + q * Eigen::Matrix4cd::Identity() / 4.0);
      const double c = concurrence(mixed);
      const double n = negativity(mixed);
      CHECK(c <= last_c + 1e-12);
      CHECK(n <= last_n + 1e-12);
      last_c = c;
      last_n = n;
    }
    CHECK(last_c == 0.0);
    CHECK(last_n == 0.0);
  }
}

TEST_CASE("quantum ground-state reference at J = B = 1") {
  const QuantumChainSpec q{6, 1.0, 1.0, Boundary::kPeriodic, 8.0};
  const auto r = analyze(rdm_from_correlators(correlators(thermal_state(build_tfim(q), 8.0), 0, q.boundary)));
  CHECK(r.concurrence > 0.0);
  CHECK(r.negativity > 0.0);
}

TEST_CASE("small MC overshoot is clamped and repaired") {
  auto c = make_set(0.0, 1.0, -1.0, 1.0, Provenance::kClassicalMc);
  c.c_x = 1.004;
  c.std_err = {0.01, 0.01, 0.01, 0.01, 0.01};
  const auto rho = rdm_from_correlators(c);
  CHECK(rho.clamped);
  CHECK(rho.source == Provenance::kClassicalMc);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho.matrix);
  CHECK(es.eigenvalues()(0) >= -1e-15);
  CHECK(std::abs(rho.matrix.trace().real() - 1.0) < 1e-12);

  // Smallest eigenvalue (1 - c_x + c_y + c_z)/4 = -0.0025, inside the MC tolerance: repaired.
  auto d = make_set(0.0, 1.0, -1.0, 0.99, Provenance::kClassicalMc);
  d.std_err = {0.005, 0.005, 0.005, 0.005, 0.005};
  const auto fixed = rdm_from_correlators(d);
  CHECK(fixed.repair_applied);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> fe(fixed.matrix);
  CHECK(fe.eigenvalues()(0) >= -1e-15);
  CHECK(std::abs(fixed.matrix.trace().real() - 1.0) < 1e-12);
  CHECK(analyze(fixed).repair_applied);
}

TEST_CASE("inconsistent correlators are rejected") {
  // c_x = c_z = 1 with c_y = +1 is not a valid state (eigenvalue -1/2).
  try {
    rdm_from_correlators(make_set(0.0, 1.0, 1.0, 1.0));
    FAIL("expected inconsistent correlators");
  } catch (const BridgeError& e) {
    CHECK(e.kind() == ErrorKind::kInconsistentCorrelators);
    CHECK(e.exit_code() == 3);
  }
  // An exact source has no slack for values outside [-1, 1].
  CHECK_THROWS_AS(rdm_from_correlators(make_set(0.0, 1.2, 0.0, 0.0)), BridgeError);
  // MC overshoot far beyond its error bar.
  auto c = make_set(0.0, 1.2, 0.0, 0.0, Provenance::kClassicalMc);
  c.std_err = {0.01, 0.01, 0.01, 0.01, 0.01};
  CHECK_THROWS_AS(rdm_from_correlators(c), BridgeError);
}

TEST_CASE("tolerances and report JSON") {
  auto c = make_set(0.1, 0.2, 0.0, 0.3, Provenance::kClassicalMc);
  c.std_err = {0.01, 0.02, 0.03, 0.04, 0.05};
  CHECK(propagated_error(c) == doctest::Approx(0.25 * 0.15));
  CHECK(psd_tolerance(c) == doctest::Approx(3 * 0.25 * 0.15));
  CHECK(psd_tolerance(make_set(0, 0, 0, 0)) == 1e-9);

  const auto r = analyze(rdm_from_correlators(make_set(0, 1, -1, 1)));
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["concurrence"].get<double>() == r.concurrence);
  CHECK(j["negativity"].get<double>() == r.negativity);
  CHECK(j["entangled"] == true);
  CHECK(j["repair_applied"] == false);
  CHECK(j["source"] == "quantum-exact");
}
