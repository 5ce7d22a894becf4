#include "qcbridge/lattice_eval.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>

#include "qcbridge/errors.hpp"
#include "qcbridge/parallel.hpp"

namespace qcbridge {
namespace {

constexpr const char* kModule = "lattice_eval";

struct Couplings {
  double spatial;
  double temporal;
};

Couplings require_real(const ClassicalLatticeSpec& lattice) {
  lattice.validate();
  if (!lattice.is_real()) {
    raise(ErrorKind::kSignProblem, kModule, "exact evaluation needs real couplings");
  }
  return {lattice.spatial_coupling.real(), lattice.temporal_coupling.real()};
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Spatial bond energy of one row state: bonds (j, j+1), wrapping when periodic.
std::vector<double> row_spatial_energies(int columns, Boundary boundary, double coupling) {
  const std::uint32_t dim = 1u << columns;
  const std::uint32_t mask = dim - 1;
  std::vector<double> energy(dim);
  const int bonds = boundary == Boundary::kPeriodic ? columns : columns - 1;
  for (std::uint32_t r = 0; r < dim; ++r) {
    std::uint32_t mismatches;
    if (boundary == Boundary::kPeriodic) {
      const std::uint32_t rotated = ((r >> 1) | ((r & 1u) << (columns - 1))) & mask;
      mismatches = r ^ rotated;
    } else {
      mismatches = (r ^ (r >> 1)) & ((1u << (columns - 1)) - 1u);
    }
    energy[r] = coupling * static_cast<double>(bonds - 2 * std::popcount(mismatches));
  }
  return energy;
}

// A signed number stored as sign * exp(log_abs).
struct LogValue {
  double sign = 0.0;
  double log_abs = -std::numeric_limits<double>::infinity();
};

LogValue log_sum(const std::vector<LogValue>& terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    if (t.sign != 0.0) top = std::max(top, t.log_abs);
  }
  if (!std::isfinite(top)) return {};
  CompensatedSum acc;
  for (const auto& t : terms) {
    if (t.sign != 0.0) acc.add(t.sign * std::exp(t.log_abs - top));
  }
  const double s = acc.value();
  if (s == 0.0) return {};
  return {s > 0 ? 1.0 : -1.0, top + std::log(std::abs(s))};
}

int y_sign(const std::vector<InsertionSpec>& ins) {
  const auto ny = std::count_if(ins.begin(), ins.end(),
                                [](const InsertionSpec& i) { return i.kind == InsertionKind::kYSpinBond; });
  return (ny / 2) % 2 == 0 ? 1 : -1;
}

// ---------------------------------------------------------------- enumeration

struct EnumerationResult {
  double log_z;
  std::vector<double> values;
};

EnumerationResult enumerate(const ClassicalLatticeSpec& lattice,
                            const std::vector<std::vector<InsertionSpec>>& lists) {
  const Couplings k = require_real(lattice);
  const int cap = enumeration_spin_cap();
  if (lattice.spin_count() > cap) {
    raise(ErrorKind::kDimensionLimit, kModule,
          "enumeration of " + std::to_string(lattice.spin_count()) + " spins exceeds the cap of " +
              std::to_string(cap));
  }
  for (const auto& l : lists) validate_insertions(lattice, l);

  const int m = lattice.columns;
  const int n = lattice.rows;
  const std::uint32_t mask = (1u << m) - 1u;
  const std::uint64_t total = std::uint64_t{1} << lattice.spin_count();
  const auto spatial = row_spatial_energies(m, lattice.boundary_space, k.spatial);

  auto energy = [&](std::uint64_t config) {
    double e = 0.0;
    for (int l = 0; l < n; ++l) {
      const auto row = static_cast<std::uint32_t>((config >> (l * m)) & mask);
      const auto next = static_cast<std::uint32_t>((config >> (((l + 1) % n) * m)) & mask);
      e += spatial[row] + k.temporal * static_cast<double>(m - 2 * std::popcount(row ^ next));
    }
    return e;
  };
  auto spin = [&](std::uint64_t config, int j, int l) {
    return ((config >> (l * m + j)) & 1u) ? -1.0 : 1.0;
  };
  auto weight = [&](std::uint64_t config, const std::vector<InsertionSpec>& ins, int sign) {
    double w = sign;
    for (const auto& i : ins) {
      const double s = spin(config, i.column, i.slice);
      const double s_next = spin(config, i.column, (i.slice + 1) % n);
      switch (i.kind) {
        case InsertionKind::kZ: w *= s; break;
        case InsertionKind::kXBond: w *= std::exp(-i.strength * s * s_next); break;
        case InsertionKind::kYSpinBond: w *= std::exp(-i.strength * s * s_next) * s_next; break;
      }
    }
    return w;
  };

  const std::size_t blocks = static_cast<std::size_t>(std::min<std::uint64_t>(total, 256));
  const std::uint64_t stride = total / blocks;
  auto block_range = [&](std::size_t b) {
    const std::uint64_t lo = b * stride;
    const std::uint64_t hi = (b + 1 == blocks) ? total : lo + stride;
    return std::pair{lo, hi};
  };

  std::vector<double> block_max(blocks, -std::numeric_limits<double>::infinity());
  parallel_for(blocks, [&](std::size_t b) {
    auto [lo, hi] = block_range(b);
    double top = -std::numeric_limits<double>::infinity();
    for (std::uint64_t c = lo; c < hi; ++c) top = std::max(top, energy(c));
    block_max[b] = top;
  });
  const double e_max = *std::max_element(block_max.begin(), block_max.end());

  std::vector<int> signs;
  for (const auto& l : lists) signs.push_back(y_sign(l));
  const std::size_t nl = lists.size();
  std::vector<std::vector<CompensatedSum>> sums(blocks, std::vector<CompensatedSum>(nl + 1));
  parallel_for(blocks, [&](std::size_t b) {
    auto [lo, hi] = block_range(b);
    auto& acc = sums[b];
    for (std::uint64_t c = lo; c < hi; ++c) {
      const double boltz = std::exp(energy(c) - e_max);
      acc[0].add(boltz);
      for (std::size_t q = 0; q < nl; ++q) {
        if (!lists[q].empty()) acc[q + 1].add(boltz * weight(c, lists[q], signs[q]));
      }
    }
  });

  std::vector<CompensatedSum> reduced(nl + 1);
  for (const auto& block : sums) {
    for (std::size_t q = 0; q <= nl; ++q) {
      reduced[q].add(block[q].sum);
      reduced[q].add(block[q].carry);
    }
  }
  EnumerationResult out;
  const double z = reduced[0].value();
  out.log_z = e_max + std::log(z);
  for (std::size_t q = 0; q < nl; ++q) {
    out.values.push_back(lists[q].empty() ? 1.0 : reduced[q + 1].value() / z);
  }
  return out;
}

// ------------------------------------------------------------ transfer matrix

// Contracts tr prod_l [ L_l (x)_j t_{j,l} R_l ] with the spatial weight of each row
// split symmetrically between the two slice matrices that touch it.
class RowTransfer {
 public:
  explicit RowTransfer(const ClassicalLatticeSpec& lattice) : k_(require_real(lattice)) {
    if (lattice.columns > kMaxTransferColumns) {
      raise(ErrorKind::kDimensionLimit, kModule,
            "transfer matrix needs M <= " + std::to_string(kMaxTransferColumns) + ", got " +
                std::to_string(lattice.columns));
    }
    columns_ = lattice.columns;
    rows_ = lattice.rows;
    dim_ = std::size_t{1} << columns_;
    const auto spatial = row_spatial_energies(columns_, lattice.boundary_space, k_.spatial);
    const double top = *std::max_element(spatial.begin(), spatial.end());
    half_spatial_.resize(dim_);
    for (std::size_t s = 0; s < dim_; ++s) half_spatial_[s] = std::exp(0.5 * (spatial[s] - top));
    const double kt = std::abs(k_.temporal);
    aligned_ = std::exp(k_.temporal - kt);
    anti_ = std::exp(-k_.temporal - kt);
    layer_log_scale_ = top + columns_ * kt;
  }

  LogValue trace(const std::vector<InsertionSpec>& ins) const {
    const auto layers = build_layers(ins);
    std::vector<LogValue> diag(dim_);
    const std::size_t blocks = std::min<std::size_t>(dim_, 64);
    parallel_for(blocks, [&](std::size_t b) {
      std::vector<double> v(dim_);
      for (std::size_t start = b; start < dim_; start += blocks) diag[start] = propagate(start, layers, v);
    });
    LogValue total = log_sum(diag);
    total.sign *= y_sign(ins);
    return total;
  }

 private:
  struct Layer {
    std::vector<double> left;   // indexed by row-l state
    std::vector<double> right;  // indexed by row-(l+1) state
    // Per column 2x2 temporal weight t[a][b], a row-l spin bit, b row-(l+1) spin bit.
    std::vector<std::array<double, 4>> temporal;
  };

  std::vector<Layer> build_layers(const std::vector<InsertionSpec>& ins) const {
    std::vector<Layer> layers(static_cast<std::size_t>(rows_));
    for (auto& layer : layers) {
      layer.left = half_spatial_;
      layer.right = half_spatial_;
      layer.temporal.assign(static_cast<std::size_t>(columns_), {aligned_, anti_, anti_, aligned_});
    }
    auto apply_spin = [&](std::vector<double>& diag, int column) {
      for (std::size_t s = 0; s < dim_; ++s) {
        if ((s >> column) & 1u) diag[s] = -diag[s];
      }
    };
    for (const auto& i : ins) {
      auto& layer = layers[static_cast<std::size_t>(i.slice)];
      switch (i.kind) {
        case InsertionKind::kZ:
          apply_spin(layer.left, i.column);
          break;
        case InsertionKind::kYSpinBond:
          apply_spin(layer.right, i.column);
          [[fallthrough]];
        case InsertionKind::kXBond: {
          auto& t = layer.temporal[static_cast<std::size_t>(i.column)];
          const double down = std::exp(-i.strength);
          const double up = std::exp(i.strength);
          t[0] *= down;
          t[3] *= down;
          t[1] *= up;
          t[2] *= up;
          break;
        }
      }
    }
    return layers;
  }

  LogValue propagate(std::size_t start, const std::vector<Layer>& layers, std::vector<double>& v) const {
    std::fill(v.begin(), v.end(), 0.0);
    v[start] = 1.0;
    double log_scale = 0.0;
    for (const auto& layer : layers) {
      for (std::size_t s = 0; s < dim_; ++s) v[s] *= layer.left[s];
      for (int j = 0; j < columns_; ++j) {
        const auto& t = layer.temporal[static_cast<std::size_t>(j)];
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t s = 0; s < dim_; ++s) {
          if (s & bit) continue;
          const double u0 = v[s];
          const double u1 = v[s | bit];
          v[s] = u0 * t[0] + u1 * t[2];
          v[s | bit] = u0 * t[1] + u1 * t[3];
        }
      }
      double top = 0.0;
      for (std::size_t s = 0; s < dim_; ++s) {
        v[s] *= layer.right[s];
        top = std::max(top, std::abs(v[s]));
      }
      if (top == 0.0) return {};
      for (double& x : v) x /= top;
      log_scale += std::log(top) + layer_log_scale_;
    }
    const double d = v[start];
    if (d == 0.0) return {};
    return {d > 0 ? 1.0 : -1.0, log_scale + std::log(std::abs(d))};
  }

  Couplings k_;
  int columns_ = 0;
  int rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> half_spatial_;
  double aligned_ = 1.0;
  double anti_ = 1.0;
  double layer_log_scale_ = 0.0;
};

std::vector<double> transfer_expectations(const ClassicalLatticeSpec& lattice,
                                          const std::vector<std::vector<InsertionSpec>>& lists,
                                          double* log_partition) {
  for (const auto& l : lists) validate_insertions(lattice, l);
  const RowTransfer transfer(lattice);
  const LogValue z = transfer.trace({});
  if (z.sign <= 0.0) raise(ErrorKind::kNumeric, kModule, "partition function underflowed");
  if (log_partition) *log_partition = z.log_abs;
  std::vector<double> values;
  for (const auto& l : lists) {
    if (l.empty()) {
      values.push_back(1.0);
      continue;
    }
    const LogValue num = transfer.trace(l);
    values.push_back(num.sign * std::exp(num.log_abs - z.log_abs));
  }
  return values;
}

}  // namespace

int enumeration_spin_cap() {
  if (const char* env = std::getenv("BRIDGE_MAX_SPINS")) {
    try {
      const int v = std::stoi(env);
      return std::clamp(v, 1, kMaxEnumerationSpins);
    } catch (...) {
    }
  }
  return kDefaultEnumerationSpins;
}

const char* to_string(EvalMethod method) noexcept {
  return method == EvalMethod::kEnumeration ? "enum" : "transfer-matrix";
}

Provenance provenance_of(EvalMethod method) noexcept {
  return method == EvalMethod::kEnumeration ? Provenance::kClassicalEnum : Provenance::kClassicalTransfer;
}

double enumerate_log_z(const ClassicalLatticeSpec& lattice) { return enumerate(lattice, {}).log_z; }

double transfer_log_z(const ClassicalLatticeSpec& lattice) {
  double lz = 0.0;
  transfer_expectations(lattice, {}, &lz);
  return lz;
}

double log_z(const ClassicalLatticeSpec& lattice, EvalMethod method) {
  return method == EvalMethod::kEnumeration ? enumerate_log_z(lattice) : transfer_log_z(lattice);
}

std::vector<double> expectations(const ClassicalLatticeSpec& lattice,
                                 const std::vector<std::vector<InsertionSpec>>& lists,
                                 EvalMethod method, double* log_partition) {
  if (method == EvalMethod::kEnumeration) {
    auto r = enumerate(lattice, lists);
    if (log_partition) *log_partition = r.log_z;
    return r.values;
  }
  return transfer_expectations(lattice, lists, log_partition);
}

LatticeObservableResult expectation(const ClassicalLatticeSpec& lattice,
                                    const std::vector<InsertionSpec>& insertions, EvalMethod method) {
  LatticeObservableResult r;
  r.method = method;
  r.value = expectations(lattice, {insertions}, method, &r.log_partition).front();
  return r;
}

double free_energy(const ClassicalLatticeSpec& lattice, EvalMethod method) {
  if (!lattice.origin || !(lattice.origin->beta > 0.0)) {
    raise(ErrorKind::kValidation, kModule, "free energy needs the originating beta (lattice.origin)");
  }
  const double lz = log_z(lattice, method);
  return -(lattice.log_prefactor.real() + lz) / lattice.origin->beta;
}

std::vector<std::vector<InsertionSpec>> correlator_insertions(const ClassicalLatticeSpec& lattice,
                                                              int site, int slice) {
  if (site < 0 || site >= lattice.columns) {
    raise(ErrorKind::kSiteOutOfRange, kModule, "site " + std::to_string(site) + " out of range");
  }
  if (lattice.boundary_space == Boundary::kOpen && site + 1 >= lattice.columns) {
    raise(ErrorKind::kSiteOutOfRange, kModule, "site has no right neighbour on an open lattice");
  }
  const int next = (site + 1) % lattice.columns;
  return {
      insertion_for(lattice, {ObservableKind::kSigmaX, site}, slice),
      insertion_for(lattice, {ObservableKind::kSigmaX, next}, slice),
      insertion_for(lattice, {ObservableKind::kXX, site, next}, slice),
      insertion_for(lattice, {ObservableKind::kYY, site, next}, slice),
      insertion_for(lattice, {ObservableKind::kZZ, site, next}, slice),
  };
}

CorrelatorSet lattice_correlators(const ClassicalLatticeSpec& lattice, int site, EvalMethod method,
                                  int slice) {
  const auto v = expectations(lattice, correlator_insertions(lattice, site, slice), method);
  CorrelatorSet c;
  c.provenance = provenance_of(method);
  c.m_x = v[0];
  c.m_x_next = v[1];
  c.c_x = v[2];
  c.c_y = v[3];
  c.c_z = v[4];
  return c;
}

}  // namespace qcbridge
