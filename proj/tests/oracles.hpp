#pragma once

// Independent reference computations used only by the tests. Nothing here
// shares code with the library paths it checks.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

inline Eigen::Matrix2cd pauli(char which) {
  Eigen::Matrix2cd p;
  switch (which) {
    case 'x': p << 0, 1, 1, 0; break;
    case 'y': p << 0, cd(0, -1), cd(0, 1), 0; break;
    case 'z': p << 1, 0, 0, -1; break;
    default: p.setIdentity(); break;
  }
  return p;
}

inline Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Operator acting as `p` on `site` of an M-site chain. The library stores site j
// as bit j (site 0 least significant), so site 0 is the rightmost factor.
inline Eigen::MatrixXcd site_op(char p, int site, int sites) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (int k = sites - 1; k >= 0; --k) out = kron(out, k == site ? pauli(p) : pauli('i'));
  return out;
}

inline Eigen::MatrixXcd tfim(int sites, double j, double b, bool periodic) {
  const Eigen::Index dim = Eigen::Index{1} << sites;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const int bonds = periodic ? sites : sites - 1;
  for (int s = 0; s < bonds; ++s) h -= j * site_op('z', s, sites) * site_op('z', (s + 1) % sites, sites);
  for (int s = 0; s < sites; ++s) h -= b * site_op('x', s, sites);
  return h;
}

// log sum_sigma exp(sum_bonds K s s') with an explicit bond list:
// spatial (j,l)-(j+1,l) (wrapping when periodic), temporal (j,l)-(j,l+1 mod n).
inline double brute_log_z(int m, int n, double ks, double kt, bool periodic,
                          std::vector<double>* energies = nullptr) {
  struct Bond {
    int a, b;
    double k;
  };
  std::vector<Bond> bonds;
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < m; ++j) {
      if (periodic || j + 1 < m) bonds.push_back({l * m + j, l * m + (j + 1) % m, ks});
      bonds.push_back({l * m + j, ((l + 1) % n) * m + j, kt});
    }
  }
  const long total = 1L << (m * n);
  std::vector<double> e(static_cast<std::size_t>(total));
  double top = -1e300;
  for (long c = 0; c < total; ++c) {
    double en = 0.0;
    for (const auto& bd : bonds) {
      const int sa = ((c >> bd.a) & 1) ? -1 : 1;
      const int sb = ((c >> bd.b) & 1) ? -1 : 1;
      en += bd.k * sa * sb;
    }
    e[static_cast<std::size_t>(c)] = en;
    top = std::max(top, en);
  }
  long double z = 0.0L;
  for (double en : e) z += std::exp(static_cast<long double>(en - top));
  if (energies) *energies = e;
  return top + std::log(static_cast<double>(z));
}

// Insertion factor on the classical lattice: 'z' multiplies by s(col,slice),
// 'x' by exp(-k s s') with s' one slice later, 'y' by exp(-k s s') s' and
// each pair of 'y' factors carries an extra -1.
struct Insert {
  char kind;
  int col, slice;
  double k;
};

// <prod of insertion factors> by direct summation, using the same bond list as
// brute_log_z.
inline double brute_expectation(int m, int n, double ks, double kt, bool periodic,
                                const std::vector<Insert>& ins) {
  std::vector<double> e;
  const double lz = brute_log_z(m, n, ks, kt, periodic, &e);
  int ny = 0;
  for (const auto& i : ins) ny += i.kind == 'y';
  long double num = 0.0L;
  for (long c = 0; c < static_cast<long>(e.size()); ++c) {
    auto spin = [&](int col, int slice) { return ((c >> (slice * m + col)) & 1) ? -1.0 : 1.0; };
    double w = 1.0;
    for (const auto& i : ins) {
      const double s = spin(i.col, i.slice);
      const double s2 = spin(i.col, (i.slice + 1) % n);
      if (i.kind == 'z') w *= s;
      if (i.kind == 'x') w *= std::exp(-i.k * s * s2);
      if (i.kind == 'y') w *= std::exp(-i.k * s * s2) * s2;
    }
    num += static_cast<long double>(w) * std::exp(static_cast<long double>(e[static_cast<std::size_t>(c)] - lz));
  }
  return ((ny / 2) % 2 ? -1.0 : 1.0) * static_cast<double>(num);
}

}  // namespace oracle
