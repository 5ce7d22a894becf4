#pragma once

// Experiment driver behind the `bridge` executable: JSON experiment configs,
// the subcommands, and their tabular outputs. Every command returns its
// results as a Table so they can be inspected without touching the disk;
// run() adds argument parsing and file output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qcbridge/mc_sampler.hpp"
#include "qcbridge/spinchain_exact.hpp"

namespace qcbridge::cli {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr int kOutputSchemaVersion = 1;

enum class Method { kExactQuantum, kEnumeration, kTransferMatrix, kMonteCarlo };

const char* to_string(Method m) noexcept;
Method method_from_string(std::string_view text);

enum class Format { kCsv, kJson };

struct SweepSpec {
  std::string parameter;  // "B_over_J" or "beta"
  std::vector<double> values;
};

struct PropagateSpec {
  double energy = 0.0;
  double tunnelling = 0.0;
  double time = 0.0;
  std::vector<int> slices;
  std::optional<double> beta;  // also report the continued thermal trace
};

// Units: J and B in energy, beta in inverse energy, hbar = k_B = 1.
struct ExperimentConfig {
  std::optional<QuantumChainSpec> quantum;
  // beta was omitted and set to 20 / max(|J|, |B|) as a ground-state proxy.
  bool beta_is_proxy = false;
  int site = 0;
  std::vector<int> trotter_n;
  std::vector<Method> methods;
  std::optional<McConfig> mc;
  std::string output_dir = ".";
  Format format = Format::kCsv;
  std::optional<SweepSpec> sweep;
  std::optional<PropagateSpec> propagate;

  bool has(Method m) const;
  void validate() const;
};

double ground_state_proxy_beta(double coupling, double field);

ExperimentConfig config_from_json(const std::string& text);

// Command-line flags that replace config entries.
struct Overrides {
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<Format> format;
  std::optional<std::vector<int>> trotter_n;
  std::optional<std::vector<Method>> methods;
};

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

// Empty cells are written as an empty CSV field and as JSON null.
using Cell = std::variant<std::monostate, double, long long, std::string, bool>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  const Cell& at(std::size_t row, std::string_view column) const;
  double number(std::size_t row, std::string_view column) const;

  // "# qcbridge.<name> v1", a header line, then one line per row; doubles with 17 digits.
  std::string to_csv() const;
  // {"schema", "schema_version", "columns", "rows": [{column: value}]}.
  std::string to_json() const;
};

// (n, canonical lattice JSON) per Trotter number.
std::vector<std::pair<int, std::string>> cmd_map(const ExperimentConfig& config);

Table cmd_exact(const ExperimentConfig& config);

// Exact classical evaluation (enum and/or transfer-matrix) for every n.
Table cmd_eval(const ExperimentConfig& config);

// Monte Carlo estimates for every n. When `traces` is given, per-bin means are
// appended as (file name, CSV text).
Table cmd_mc(const ExperimentConfig& config,
             std::vector<std::pair<std::string, std::string>>* traces = nullptr);

struct Comparison {
  Table rows;
  Table timing;  // runtime_ms per (method, n), kept apart so `rows` is reproducible
};

Comparison cmd_compare(const ExperimentConfig& config);

Table cmd_propagate(const ExperimentConfig& config);

Table cmd_sweep(const ExperimentConfig& config);

// Full command line: returns the process exit code (0, or 2/3/4 per error kind).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcbridge::cli
