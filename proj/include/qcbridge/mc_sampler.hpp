#pragma once

// Single-spin Metropolis sampling of a mapped lattice with binned jackknife
// errors. Chain c uses the counter-based stream keyed by seed + c; chains are
// merged in index order, so estimates are bit-reproducible for a given config
// regardless of how many worker threads ran them.

#include <cstdint>
#include <string>
#include <vector>

#include "qcbridge/rng.hpp"
#include "qcbridge/trotter_map.hpp"
#include "qcbridge/types.hpp"

namespace qcbridge {

struct McConfig {
  std::uint64_t seed = 1;
  int chains = 4;
  int sweeps = 20000;  // total per chain, burn-in included
  int burn_in = 4000;
  int bins = 32;

  // burn_in = 20% of sweeps, 32 bins.
  static McConfig with_defaults(std::uint64_t seed, int chains, int sweeps);
  void validate() const;
};

// Packed +-1 spins, bit set meaning -1. Spin (j, l) is bit l * columns + j.
class SpinConfiguration {
 public:
  SpinConfiguration(int columns, int rows);

  int columns() const { return columns_; }
  int rows() const { return rows_; }
  int spin(int column, int row) const {
    const std::size_t idx = index(column, row);
    return ((words_[idx >> 6] >> (idx & 63)) & 1u) ? -1 : 1;
  }
  void flip(int column, int row) {
    const std::size_t idx = index(column, row);
    words_[idx >> 6] ^= std::uint64_t{1} << (idx & 63);
  }
  void randomize(CounterRng& rng);
  std::uint64_t packed_row(int row) const;  // columns <= 64

  bool operator==(const SpinConfiguration&) const = default;

 private:
  std::size_t index(int column, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(columns_) +
           static_cast<std::size_t>(column);
  }
  int columns_;
  int rows_;
  std::vector<std::uint64_t> words_;
};

// Bond energy sum_{bonds} K s s' of a configuration (log of its Boltzmann weight).
double configuration_energy(const SpinConfiguration& config, const ClassicalLatticeSpec& lattice);

// M*n single-spin Metropolis updates at uniformly drawn sites. Returns accepted flips.
std::size_t metropolis_sweep(SpinConfiguration& config, const ClassicalLatticeSpec& lattice,
                             CounterRng& rng);

// Product of insertion factors for one configuration, all slices shifted by `shift`.
double insertion_weight(const SpinConfiguration& config, const std::vector<InsertionSpec>& insertions,
                        int shift = 0);

struct Estimate {
  double mean = 0.0;
  double std_err = 0.0;
  long n_samples = 0;
  // Integrated autocorrelation time in sweeps, from binned vs naive variance.
  double autocorrelation_hint = 0.0;
  double max_abs_sample = 0.0;
  std::vector<std::vector<double>> bin_means;  // [chain][bin]
};

// Runs the chains once and measures every insertion list on the same samples,
// averaging each estimator over all Trotter slices.
std::vector<Estimate> estimate_many(const ClassicalLatticeSpec& lattice,
                                    const std::vector<std::vector<InsertionSpec>>& lists,
                                    const McConfig& mc);

Estimate estimate(const ClassicalLatticeSpec& lattice, const std::vector<InsertionSpec>& insertions,
                  const McConfig& mc);

CorrelatorSet mc_correlators(const ClassicalLatticeSpec& lattice, int site, const McConfig& mc,
                             std::vector<Estimate>* raw = nullptr);

// JSON forms. Estimate JSON omits the per-bin means (see bin_trace_csv).
std::string to_json(const Estimate& e);
std::string to_json(const McConfig& mc);
McConfig mc_config_from_json(const std::string& text);

// Columns: chain,bin,value.
std::string bin_trace_csv(const Estimate& e);

}  // namespace qcbridge
