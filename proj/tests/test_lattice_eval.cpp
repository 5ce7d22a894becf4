#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qcbridge/errors.hpp"
#include "qcbridge/lattice_eval.hpp"
#include "qcbridge/spinchain_exact.hpp"
#include "qcbridge/trotter_map.hpp"

using namespace qcbridge;

namespace {

ClassicalLatticeSpec make_lattice(int m, int n, double ks, double kt, Boundary b) {
  ClassicalLatticeSpec l;
  l.columns = m;
  l.rows = n;
  l.spatial_coupling = ks;
  l.temporal_coupling = kt;
  l.log_prefactor = 0.0;
  l.boundary_space = b;
  return l;
}

std::vector<oracle::Insert> to_oracle(const std::vector<InsertionSpec>& ins) {
  std::vector<oracle::Insert> out;
  for (const auto& i : ins) {
    const char kind = i.kind == InsertionKind::kZ ? 'z' : i.kind == InsertionKind::kXBond ? 'x' : 'y';
    out.push_back({kind, i.column, i.slice, i.strength});
  }
  return out;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("enumeration examples") {
  const auto ring = make_lattice(1, 3, 0.0, 1.0, Boundary::kOpen);
  const double z = std::pow(2 * std::cosh(1.0), 3) + std::pow(2 * std::sinh(1.0), 3);
  CHECK(std::abs(std::exp(enumerate_log_z(ring)) - 42.378350493403989) < 1e-12);
  CHECK(std::abs(std::exp(enumerate_log_z(ring)) - z) < 1e-12);

  const auto zero = make_lattice(3, 5, 0.0, 0.0, Boundary::kPeriodic);
  CHECK(std::abs(enumerate_log_z(zero) - 15 * std::log(2.0)) < 1e-13);
  CHECK(std::abs(transfer_log_z(zero) - 15 * std::log(2.0)) < 1e-13);

  // 16-term sum; each wrapped pair carries two bonds, i.e. a four-ring at K = 1.
  const auto square = make_lattice(2, 2, 0.5, 0.5, Boundary::kPeriodic);
  CHECK(std::abs(enumerate_log_z(square) - 4.7977137474881507952) < 1e-13);
  CHECK(std::abs(transfer_log_z(square) - 4.7977137474881507952) < 1e-13);
}

TEST_CASE("transfer matrix matches enumeration on 3x4 periodic") {
  const auto l = make_lattice(3, 4, 0.7, -0.4, Boundary::kPeriodic);
  const double e = enumerate_log_z(l);
  CHECK(rel_err(transfer_log_z(l), e) <= 1e-12);
  CHECK(rel_err(e, oracle::brute_log_z(3, 4, 0.7, -0.4, true)) <= 1e-12);
}

TEST_CASE("property: transfer matrix equals enumeration for random lattices with M*n <= 20") {
  std::mt19937_64 gen(20240611);
  std::uniform_real_distribution<double> coupling(-2.0, 2.0);
  std::uniform_int_distribution<int> cols(1, 6);
  for (int trial = 0; trial < 60; ++trial) {
    const int m = cols(gen);
    std::uniform_int_distribution<int> rows(1, 20 / m);
    const int n = rows(gen);
    const Boundary b = (trial % 2 == 0) ? Boundary::kPeriodic : Boundary::kOpen;
    const auto l = make_lattice(m, n, coupling(gen), coupling(gen), b);
    const double enumerated = enumerate_log_z(l);
    CAPTURE(m);
    CAPTURE(n);
    CHECK(rel_err(transfer_log_z(l), enumerated) <= 1e-12);
    const double brute = oracle::brute_log_z(m, n, l.spatial_coupling.real(), l.temporal_coupling.real(),
                                             b == Boundary::kPeriodic);
    CHECK(rel_err(enumerated, brute) <= 1e-12);
  }
}

TEST_CASE("property: insertion expectations agree across methods and the oracle") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> coupling(-1.5, 1.5);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = 3 + trial % 2;
    const int n = 2 + trial % 3;
    const auto l = make_lattice(m, n, coupling(gen), std::abs(coupling(gen)) + 0.05,
                                trial % 3 ? Boundary::kPeriodic : Boundary::kOpen);
    const int slice = trial % n;
    for (const auto& ins : correlator_insertions(l, 1, slice)) {
      const double want = oracle::brute_expectation(m, n, l.spatial_coupling.real(),
                                                    l.temporal_coupling.real(),
                                                    l.boundary_space == Boundary::kPeriodic, to_oracle(ins));
      const double en = expectation(l, ins, EvalMethod::kEnumeration).value;
      const double tm = expectation(l, ins, EvalMethod::kTransferMatrix).value;
      CHECK(std::abs(en - want) < 1e-11);
      CHECK(std::abs(tm - want) < 1e-11);
    }
  }
}

TEST_CASE("n = 1 reduces to the trace of one row matrix") {
  // Row matrix T(s, s') = exp(K_t sum_j s_j s'_j + spatial(s)/2 + spatial(s')/2); with n = 1
  // the temporal bond pairs each spin with itself.
  const int m = 3;
  const double ks = 0.6, kt = -0.3;
  const auto l = make_lattice(m, 1, ks, kt, Boundary::kPeriodic);
  double trace = 0.0;
  for (int c = 0; c < 8; ++c) {
    double e = m * kt;
    for (int j = 0; j < m; ++j) {
      const int a = ((c >> j) & 1) ? -1 : 1;
      const int b = ((c >> ((j + 1) % m)) & 1) ? -1 : 1;
      e += ks * a * b;
    }
    trace += std::exp(e);
  }
  CHECK(rel_err(transfer_log_z(l), std::log(trace)) < 1e-13);
  CHECK(rel_err(enumerate_log_z(l), std::log(trace)) < 1e-13);
}

TEST_CASE("J = 0 decouples into independent rings") {
  for (int n : {1, 2, 5, 9}) {
    const double kt = 0.45;
    const auto l = make_lattice(4, n, 0.0, kt, Boundary::kPeriodic);
    const double ring = std::log(std::pow(2 * std::cosh(kt), n) + std::pow(2 * std::sinh(kt), n));
    CHECK(rel_err(transfer_log_z(l), 4 * ring) < 1e-13);
  }
}

TEST_CASE("J = 0 single XBond gives tanh(beta B) for every n") {
  for (int n : {1, 2, 4, 8}) {
    const auto l = map_tfim({3, 0.0, 1.0, Boundary::kPeriodic, 1.0}, n);
    const auto ins = insertion_for(l, {ObservableKind::kSigmaX, 1}, 0);
    const auto tm = expectation(l, ins, EvalMethod::kTransferMatrix);
    CHECK(std::abs(tm.value - 0.761594155955765) < 1e-12);
    CHECK(tm.method == EvalMethod::kTransferMatrix);
    const auto en = expectation(l, ins, EvalMethod::kEnumeration);
    CHECK(std::abs(en.value - 0.761594155955765) < 1e-12);
  }
}

TEST_CASE("two Z insertions on one row at n = 1 give tanh(K)") {
  const auto l = make_lattice(2, 1, 1.0, 0.0, Boundary::kOpen);
  const std::vector<InsertionSpec> zz{{InsertionKind::kZ, 0, 0, 0.0}, {InsertionKind::kZ, 1, 0, 0.0}};
  CHECK(std::abs(expectation(l, zz, EvalMethod::kEnumeration).value - 0.761594155955765) < 1e-12);
  CHECK(std::abs(expectation(l, zz, EvalMethod::kTransferMatrix).value - 0.761594155955765) < 1e-12);
  CHECK(expectation(l, {}, EvalMethod::kTransferMatrix).value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("property: expectations are independent of the insertion slice") {
  const auto l = map_tfim({5, 1.0, 0.7, Boundary::kPeriodic, 3.0}, 6);
  const auto base = lattice_correlators(l, 2, EvalMethod::kTransferMatrix, 0);
  for (int slice = 1; slice < 6; ++slice) {
    const auto c = lattice_correlators(l, 2, EvalMethod::kTransferMatrix, slice);
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(c.values()[k] - base.values()[k]) < 1e-12);
  }
}

TEST_CASE("correlators approach the quantum values as n grows") {
  const QuantumChainSpec q{6, 1.0, 1.0, Boundary::kPeriodic, 8.0};
  const auto exact = correlators(thermal_state(build_tfim(q), q.beta), 0, q.boundary);
  std::array<double, 5> previous{};
  previous.fill(1e300);
  for (int n : {4, 8, 16, 32, 64}) {
    const auto c = lattice_correlators(map_tfim(q, n), 0, EvalMethod::kTransferMatrix);
    CHECK(c.provenance == Provenance::kClassicalTransfer);
    for (std::size_t k = 0; k < 5; ++k) {
      const double err = std::abs(c.values()[k] - exact.values()[k]);
      CHECK(err < previous[k]);
      previous[k] = err;
    }
  }
}

TEST_CASE("free energy") {
  const double beta = 1.3;
  for (int n : {1, 3, 8}) {
    const auto l = map_tfim({3, 0.0, 1.0 / beta, Boundary::kPeriodic, beta}, n);
    CHECK(std::abs(free_energy(l) + 3.0 / beta * std::log(2 * std::cosh(1.0))) < 1e-12);
  }

  // Frozen from dense diagonalization: -(1/8) ln tr exp(-8 H), M=6 ring, J=B=1.
  const double quantum = -7.7417589899920385;
  const QuantumChainSpec q{6, 1.0, 1.0, Boundary::kPeriodic, 8.0};
  CHECK(std::abs(-log_partition_function(build_tfim(q), 8.0) / 8.0 - quantum) < 1e-12);
  // O(1/n) or better: n * err must not grow.
  double previous = 1e300;
  double previous_scaled = 1e300;
  for (int n : {8, 16, 32, 64}) {
    const double err = std::abs(free_energy(map_tfim(q, n)) - quantum);
    CHECK(err < previous);
    CHECK(n * err < previous_scaled);
    previous = err;
    previous_scaled = n * err;
  }
  CHECK(previous < 1.0 / 32);

  auto bare = make_lattice(2, 2, 0.1, 0.1, Boundary::kOpen);
  try {
    free_energy(bare);
    FAIL("expected missing beta");
  } catch (const BridgeError& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
  }
}

TEST_CASE("high-temperature limit of the free energy is entropic") {
  const double beta = 1e-4;
  const auto l = map_tfim({4, 1.0, 1.0, Boundary::kPeriodic, beta}, 2);
  const double f = free_energy(l);
  CHECK(std::abs(-beta * f - 4 * std::log(2.0)) < 1e-6);
}

TEST_CASE("method caps and error paths") {
  const auto big = make_lattice(5, 5, 0.1, 0.1, Boundary::kPeriodic);
  try {
    enumerate_log_z(big);
    FAIL("expected cap");
  } catch (const BridgeError& e) {
    CHECK(e.kind() == ErrorKind::kDimensionLimit);
    CHECK(e.exit_code() == 3);
  }
  CHECK_NOTHROW(transfer_log_z(big));
  CHECK_THROWS_AS(transfer_log_z(make_lattice(13, 2, 0.1, 0.1, Boundary::kOpen)), BridgeError);

  auto complex_lattice = make_lattice(2, 2, 0.1, 0.1, Boundary::kOpen);
  complex_lattice.temporal_coupling = std::complex<double>(0.1, 0.2);
  try {
    transfer_log_z(complex_lattice);
    FAIL("expected sign problem");
  } catch (const BridgeError& e) {
    CHECK(e.kind() == ErrorKind::kSignProblem);
  }

  const auto l = make_lattice(3, 3, 0.1, 0.1, Boundary::kPeriodic);
  CHECK_THROWS_AS(expectation(l, {{InsertionKind::kZ, 3, 0, 0.0}}, EvalMethod::kTransferMatrix), BridgeError);
  CHECK_THROWS_AS(expectation(l, {{InsertionKind::kZ, 0, 3, 0.0}}, EvalMethod::kEnumeration), BridgeError);
}

TEST_CASE("enumeration is bit-stable across worker counts") {
  const auto l = map_tfim({4, 1.0, 0.6, Boundary::kPeriodic, 2.0}, 5);
  const auto lists = correlator_insertions(l, 1);
  setenv("BRIDGE_WORKERS", "1", 1);
  double lz1 = 0.0;
  const auto one = expectations(l, lists, EvalMethod::kEnumeration, &lz1);
  setenv("BRIDGE_WORKERS", "3", 1);
  double lz3 = 0.0;
  const auto three = expectations(l, lists, EvalMethod::kEnumeration, &lz3);
  unsetenv("BRIDGE_WORKERS");
  CHECK(lz1 == lz3);
  CHECK(one == three);
}

TEST_CASE("enumeration cap honours the environment override") {
  setenv("BRIDGE_MAX_SPINS", "6", 1);
  CHECK(enumeration_spin_cap() == 6);
  CHECK_THROWS_AS(enumerate_log_z(make_lattice(2, 4, 0.1, 0.1, Boundary::kOpen)), BridgeError);
  setenv("BRIDGE_MAX_SPINS", "99", 1);
  CHECK(enumeration_spin_cap() == kMaxEnumerationSpins);
  unsetenv("BRIDGE_MAX_SPINS");
  CHECK(enumeration_spin_cap() == kDefaultEnumerationSpins);
}
