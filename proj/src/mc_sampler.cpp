#include "qcbridge/mc_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "qcbridge/errors.hpp"
#include "qcbridge/format.hpp"
#include "qcbridge/lattice_eval.hpp"
#include "qcbridge/parallel.hpp"

namespace qcbridge {
namespace {

constexpr const char* kModule = "mc_sampler";

void require_real(const ClassicalLatticeSpec& lattice) {
  lattice.validate();
  if (!lattice.is_real()) {
    raise(ErrorKind::kSignProblem, kModule,
          "complex couplings give complex weights; Metropolis sampling needs a real lattice");
  }
}

struct Accumulator {
  std::vector<double> bin_sums;
  double sum = 0.0;
  double sum_sq = 0.0;
  double max_abs = 0.0;
};

struct ChainResult {
  std::vector<Accumulator> per_list;
};

}  // namespace

McConfig McConfig::with_defaults(std::uint64_t seed, int chains, int sweeps) {
  McConfig mc;
  mc.seed = seed;
  mc.chains = chains;
  mc.sweeps = sweeps;
  mc.burn_in = sweeps / 5;
  mc.bins = 32;
  return mc;
}

void McConfig::validate() const {
  if (chains < 1) raise(ErrorKind::kValidation, kModule, "chains must be >= 1");
  if (burn_in < 0 || sweeps <= burn_in) raise(ErrorKind::kValidation, kModule, "need sweeps > burn_in >= 0");
  if (bins < 8) raise(ErrorKind::kValidation, kModule, "need at least 8 bins for jackknife errors");
  if (sweeps - burn_in < bins) {
    raise(ErrorKind::kValidation, kModule, "fewer measured sweeps than bins");
  }
}

SpinConfiguration::SpinConfiguration(int columns, int rows)
    : columns_(columns), rows_(rows),
      words_((static_cast<std::size_t>(columns) * static_cast<std::size_t>(rows) + 63) / 64, 0) {}

void SpinConfiguration::randomize(CounterRng& rng) {
  for (auto& w : words_) w = rng();
  const std::size_t total = static_cast<std::size_t>(columns_) * static_cast<std::size_t>(rows_);
  if (total % 64 != 0) words_.back() &= (std::uint64_t{1} << (total % 64)) - 1;
}

std::uint64_t SpinConfiguration::packed_row(int row) const {
  std::uint64_t r = 0;
  for (int j = 0; j < columns_; ++j) {
    if (spin(j, row) < 0) r |= std::uint64_t{1} << j;
  }
  return r;
}

double configuration_energy(const SpinConfiguration& config, const ClassicalLatticeSpec& lattice) {
  const double ks = lattice.spatial_coupling.real();
  const double kt = lattice.temporal_coupling.real();
  const int m = config.columns();
  const int n = config.rows();
  const int spatial_bonds = lattice.boundary_space == Boundary::kPeriodic ? m : m - 1;
  double e = 0.0;
  for (int l = 0; l < n; ++l) {
    for (int j = 0; j < spatial_bonds; ++j) e += ks * config.spin(j, l) * config.spin((j + 1) % m, l);
    for (int j = 0; j < m; ++j) e += kt * config.spin(j, l) * config.spin(j, (l + 1) % n);
  }
  return e;
}

std::size_t metropolis_sweep(SpinConfiguration& config, const ClassicalLatticeSpec& lattice,
                             CounterRng& rng) {
  require_real(lattice);
  const double ks = lattice.spatial_coupling.real();
  const double kt = lattice.temporal_coupling.real();
  const int m = config.columns();
  const int n = config.rows();
  const bool periodic = lattice.boundary_space == Boundary::kPeriodic;

  // Sites are drawn uniformly with replacement. A fixed sequential order makes
  // zero-cost flips deterministic, which traps ring-like lattices in a subset
  // of states.
  const std::uint64_t sites = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n);
  std::size_t accepted = 0;
  for (std::uint64_t step = 0; step < sites; ++step) {
    const auto pick = static_cast<std::uint64_t>((static_cast<unsigned __int128>(rng()) * sites) >> 64);
    const int j = static_cast<int>(pick % static_cast<std::uint64_t>(m));
    const int l = static_cast<int>(pick / static_cast<std::uint64_t>(m));
    double field = 0.0;
    // A neighbour equal to the spin itself (M = 1 or n = 1) is a constant bond.
    if (m > 1) {
      if (periodic || j > 0) field += ks * config.spin((j + m - 1) % m, l);
      if (periodic || j + 1 < m) field += ks * config.spin((j + 1) % m, l);
    }
    if (n > 1) field += kt * (config.spin(j, (l + n - 1) % n) + config.spin(j, (l + 1) % n));
    const double delta = -2.0 * config.spin(j, l) * field;
    if (delta >= 0.0 || rng.uniform() < std::exp(delta)) {
      config.flip(j, l);
      ++accepted;
    }
  }
  return accepted;
}

double insertion_weight(const SpinConfiguration& config, const std::vector<InsertionSpec>& insertions,
                        int shift) {
  const int n = config.rows();
  double w = 1.0;
  int y_count = 0;
  for (const auto& i : insertions) {
    const int l = (i.slice + shift) % n;
    const int s = config.spin(i.column, l);
    const int s_next = config.spin(i.column, (l + 1) % n);
    switch (i.kind) {
      case InsertionKind::kZ: w *= s; break;
      case InsertionKind::kXBond: w *= std::exp(-i.strength * s * s_next); break;
      case InsertionKind::kYSpinBond:
        w *= std::exp(-i.strength * s * s_next) * s_next;
        ++y_count;
        break;
    }
  }
  return (y_count / 2) % 2 == 0 ? w : -w;
}

std::vector<Estimate> estimate_many(const ClassicalLatticeSpec& lattice,
                                    const std::vector<std::vector<InsertionSpec>>& lists,
                                    const McConfig& mc) {
  require_real(lattice);
  mc.validate();
  for (const auto& l : lists) validate_insertions(lattice, l);

  const int n = lattice.rows;
  const int per_bin = (mc.sweeps - mc.burn_in) / mc.bins;
  const std::size_t nl = lists.size();

  std::vector<ChainResult> chains(static_cast<std::size_t>(mc.chains));
  parallel_for(chains.size(), [&](std::size_t c) {
    CounterRng rng(mc.seed, c);
    SpinConfiguration config(lattice.columns, lattice.rows);
    config.randomize(rng);
    for (int s = 0; s < mc.burn_in; ++s) metropolis_sweep(config, lattice, rng);

    ChainResult& result = chains[c];
    result.per_list.assign(nl, Accumulator{std::vector<double>(static_cast<std::size_t>(mc.bins), 0.0)});
    for (int b = 0; b < mc.bins; ++b) {
      for (int s = 0; s < per_bin; ++s) {
        metropolis_sweep(config, lattice, rng);
        for (std::size_t q = 0; q < nl; ++q) {
          double x = 1.0;
          if (!lists[q].empty()) {
            double acc = 0.0;
            for (int shift = 0; shift < n; ++shift) acc += insertion_weight(config, lists[q], shift);
            x = acc / n;
          }
          auto& a = result.per_list[q];
          a.bin_sums[static_cast<std::size_t>(b)] += x;
          a.sum += x;
          a.sum_sq += x * x;
          a.max_abs = std::max(a.max_abs, std::abs(x));
        }
      }
    }
  });

  std::vector<Estimate> out(nl);
  const auto k = static_cast<std::size_t>(mc.chains) * static_cast<std::size_t>(mc.bins);
  for (std::size_t q = 0; q < nl; ++q) {
    Estimate& e = out[q];
    std::vector<double> bins;
    bins.reserve(k);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& chain : chains) {
      const auto& a = chain.per_list[q];
      std::vector<double> means;
      for (double bs : a.bin_sums) {
        means.push_back(bs / per_bin);
        bins.push_back(bs / per_bin);
      }
      e.bin_means.push_back(std::move(means));
      sum += a.sum;
      sum_sq += a.sum_sq;
      e.max_abs_sample = std::max(e.max_abs_sample, a.max_abs);
    }
    e.n_samples = static_cast<long>(k) * per_bin;
    double total = 0.0;
    for (double b : bins) total += b;
    e.mean = total / static_cast<double>(k);

    // Delete-one-bin jackknife.
    std::vector<double> jack(k);
    double jack_mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      jack[i] = (total - bins[i]) / static_cast<double>(k - 1);
      jack_mean += jack[i];
    }
    jack_mean /= static_cast<double>(k);
    double jack_var = 0.0;
    for (double v : jack) jack_var += (v - jack_mean) * (v - jack_mean);
    e.std_err = std::sqrt(jack_var * static_cast<double>(k - 1) / static_cast<double>(k));

    const double ns = static_cast<double>(e.n_samples);
    const double naive_var = sum_sq / ns - (sum / ns) * (sum / ns);
    double bin_var = 0.0;
    for (double b : bins) bin_var += (b - e.mean) * (b - e.mean);
    bin_var /= static_cast<double>(k - 1);
    e.autocorrelation_hint = naive_var > 1e-300 ? 0.5 * per_bin * bin_var / naive_var : 0.0;
  }
  return out;
}

Estimate estimate(const ClassicalLatticeSpec& lattice, const std::vector<InsertionSpec>& insertions,
                  const McConfig& mc) {
  return estimate_many(lattice, {insertions}, mc).front();
}

CorrelatorSet mc_correlators(const ClassicalLatticeSpec& lattice, int site, const McConfig& mc,
                             std::vector<Estimate>* raw) {
  auto est = estimate_many(lattice, correlator_insertions(lattice, site), mc);
  CorrelatorSet c;
  c.provenance = Provenance::kClassicalMc;
  c.m_x = est[0].mean;
  c.m_x_next = est[1].mean;
  c.c_x = est[2].mean;
  c.c_y = est[3].mean;
  c.c_z = est[4].mean;
  for (std::size_t q = 0; q < 5; ++q) c.std_err[q] = est[q].std_err;
  if (raw) *raw = std::move(est);
  return c;
}

std::string to_json(const Estimate& e) {
  nlohmann::ordered_json j;
  j["schema"] = "qcbridge.estimate";
  j["schema_version"] = 1;
  j["mean"] = e.mean;
  j["std_err"] = e.std_err;
  j["n_samples"] = e.n_samples;
  j["autocorrelation_hint"] = e.autocorrelation_hint;
  j["max_abs_sample"] = e.max_abs_sample;
  return j.dump(2) + "\n";
}

std::string to_json(const McConfig& mc) {
  nlohmann::ordered_json j;
  j["seed"] = mc.seed;
  j["chains"] = mc.chains;
  j["sweeps"] = mc.sweeps;
  j["burn_in"] = mc.burn_in;
  j["bins"] = mc.bins;
  return j.dump(2) + "\n";
}

McConfig mc_config_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    McConfig mc = McConfig::with_defaults(j.value("seed", std::uint64_t{1}), j.value("chains", 4),
                                          j.value("sweeps", 20000));
    mc.burn_in = j.value("burn_in", mc.burn_in);
    mc.bins = j.value("bins", mc.bins);
    mc.validate();
    return mc;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::kValidation, kModule, std::string("bad McConfig JSON: ") + e.what());
  }
}

std::string bin_trace_csv(const Estimate& e) {
  std::ostringstream out;
  out << "chain,bin,value\n";
  for (std::size_t c = 0; c < e.bin_means.size(); ++c) {
    for (std::size_t b = 0; b < e.bin_means[c].size(); ++b) {
      out << c << ',' << b << ',' << format_double17(e.bin_means[c][b]) << '\n';
    }
  }
  return out.str();
}

}  // namespace qcbridge
