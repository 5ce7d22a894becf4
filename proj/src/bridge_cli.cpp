#include "qcbridge/bridge_cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcbridge/entanglement.hpp"
#include "qcbridge/errors.hpp"
#include "qcbridge/format.hpp"
#include "qcbridge/lattice_eval.hpp"
#include "qcbridge/lattice_json.hpp"
#include "qcbridge/trotter_map.hpp"

namespace qcbridge::cli {

namespace {

constexpr const char* kModule = "bridge_cli";

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& msg) { raise(ErrorKind::kValidation, kModule, msg); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) invalid(where + " must be a JSON object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) invalid("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
T required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) invalid(std::string("missing '") + key + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(std::string("wrong type for '") + key + "' in " + where);
  }
}

double number_of(const json& j, const char* key, const std::string& where) {
  if (j.contains(key) && !j.at(key).is_number()) invalid(std::string("'") + key + "' in " + where + " must be a number");
  return required<double>(j, key, where);
}

Format format_from_string(std::string_view text) {
  if (text == "csv") return Format::kCsv;
  if (text == "json") return Format::kJson;
  invalid("format must be csv or json, got '" + std::string(text) + "'");
}

const char* extension(Format f) { return f == Format::kCsv ? "csv" : "json"; }

const QuantumChainSpec& require_quantum(const ExperimentConfig& config, const char* command) {
  if (!config.quantum) invalid(std::string(command) + " needs a 'quantum' block");
  return *config.quantum;
}

void require_trotter(const ExperimentConfig& config, const char* command) {
  if (config.trotter_n.empty()) invalid(std::string(command) + " needs a non-empty trotter_n list");
}

std::vector<Method> classical_methods(const ExperimentConfig& config, bool allow_mc) {
  std::vector<Method> out;
  for (Method m : config.methods) {
    if (m == Method::kEnumeration || m == Method::kTransferMatrix || (allow_mc && m == Method::kMonteCarlo)) {
      out.push_back(m);
    }
  }
  return out;
}

EvalMethod eval_method(Method m) {
  return m == Method::kEnumeration ? EvalMethod::kEnumeration : EvalMethod::kTransferMatrix;
}

std::string beta_source(const ExperimentConfig& config) {
  return config.beta_is_proxy ? "ground-state-proxy" : "config";
}

CorrelatorSet classical_correlators(Method m, const ClassicalLatticeSpec& lattice, const ExperimentConfig& config) {
  if (m == Method::kMonteCarlo) return mc_correlators(lattice, config.site, *config.mc);
  return lattice_correlators(lattice, config.site, eval_method(m));
}

struct Measures {
  std::string status;
  std::optional<EntanglementReport> report;
  double min_eigenvalue = 0.0;  // of the unrepaired Pauli reconstruction
};

// Inconsistent correlators become a row status instead of aborting the run.
Measures measure(const CorrelatorSet& c) {
  const double min_eigenvalue = jacobi_eigen(pauli_reconstruction(c)).values(0);
  try {
    const auto r = analyze(rdm_from_correlators(c));
    return {r.repair_applied ? "repaired" : "ok", r, min_eigenvalue};
  } catch (const BridgeError& e) {
    if (e.kind() != ErrorKind::kInconsistentCorrelators) throw;
    return {"inconsistent-correlators", std::nullopt, min_eigenvalue};
  }
}

Cell concurrence_cell(const Measures& m) {
  return m.report ? Cell{m.report->concurrence} : Cell{};
}
Cell negativity_cell(const Measures& m) {
  return m.report ? Cell{m.report->negativity} : Cell{};
}
Cell entangled_cell(const Measures& m) {
  return m.report ? Cell{m.report->entangled} : Cell{};
}

struct QuantumReference {
  CorrelatorSet correlators;
  double log_partition = 0.0;
};

QuantumReference quantum_reference(const QuantumChainSpec& q, int site) {
  const auto h = build_tfim(q);
  return {correlators(thermal_state(h, q.beta), site, q.boundary), log_partition_function(h, q.beta)};
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double17(v);
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      c);
}

ordered_json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v;
        } else {
          return v;
        }
      },
      c);
}

long long ll(int v) { return static_cast<long long>(v); }

}  // namespace

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::kExactQuantum: return "exact-quantum";
    case Method::kEnumeration: return "enum";
    case Method::kTransferMatrix: return "transfer-matrix";
    case Method::kMonteCarlo: return "mc";
  }
  return "?";
}

Method method_from_string(std::string_view text) {
  for (Method m : {Method::kExactQuantum, Method::kEnumeration, Method::kTransferMatrix, Method::kMonteCarlo}) {
    if (text == to_string(m)) return m;
  }
  invalid("unknown method '" + std::string(text) + "' (exact-quantum, enum, transfer-matrix, mc)");
}

bool ExperimentConfig::has(Method m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

void ExperimentConfig::validate() const {
  if (quantum) quantum->validate_model();
  for (std::size_t i = 0; i < trotter_n.size(); ++i) {
    if (trotter_n[i] < 1) invalid("trotter_n entries must be positive");
    if (i > 0 && trotter_n[i] <= trotter_n[i - 1]) invalid("trotter_n must be strictly ascending");
  }
  std::set<Method> seen(methods.begin(), methods.end());
  if (seen.size() != methods.size()) invalid("methods must not repeat");
  if (has(Method::kMonteCarlo) != mc.has_value()) {
    invalid("an 'mc' block is required exactly when methods include mc");
  }
  if (mc) mc->validate();
  if (sweep) {
    if (sweep->parameter != "B_over_J" && sweep->parameter != "beta") {
      invalid("sweep parameter must be B_over_J or beta");
    }
    if (sweep->values.empty()) invalid("sweep values must not be empty");
  }
  if (propagate) {
    if (propagate->slices.empty()) invalid("propagate needs a non-empty m list");
    for (int m : propagate->slices) {
      if (m < 1) invalid("propagate m entries must be positive");
    }
    if (propagate->beta && !(*propagate->beta > 0.0)) invalid("propagate beta must be positive");
  }
}

double ground_state_proxy_beta(double coupling, double field) {
  const double scale = std::max(std::abs(coupling), std::abs(field));
  if (!(scale > 0.0)) invalid("J and B are both zero; no energy scale for the default beta");
  return 20.0 / scale;
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"schema_version", "quantum", "site", "trotter_n", "methods", "mc", "output_dir", "format",
                 "sweep", "propagate"},
             "config");
  const int version = required<int>(j, "schema_version", "config");
  if (version != kConfigSchemaVersion) {
    invalid("unsupported config schema_version " + std::to_string(version));
  }

  ExperimentConfig c;
  if (j.contains("quantum")) {
    const auto& q = j.at("quantum");
    check_keys(q, {"sites", "J", "B", "boundary", "beta"}, "quantum");
    QuantumChainSpec spec;
    spec.sites = required<int>(q, "sites", "quantum");
    spec.coupling = number_of(q, "J", "quantum");
    spec.field = number_of(q, "B", "quantum");
    spec.boundary = boundary_from_string(q.value("boundary", std::string("periodic")));
    if (q.contains("beta")) {
      spec.beta = number_of(q, "beta", "quantum");
    } else {
      spec.beta = ground_state_proxy_beta(spec.coupling, spec.field);
      c.beta_is_proxy = true;
    }
    c.quantum = spec;
  }
  if (j.contains("site")) c.site = required<int>(j, "site", "config");
  if (j.contains("trotter_n")) c.trotter_n = required<std::vector<int>>(j, "trotter_n", "config");
  if (j.contains("methods")) {
    for (const auto& name : required<std::vector<std::string>>(j, "methods", "config")) {
      c.methods.push_back(method_from_string(name));
    }
  }
  if (j.contains("mc")) {
    check_keys(j.at("mc"), {"seed", "chains", "sweeps", "burn_in", "bins"}, "mc");
    c.mc = mc_config_from_json(j.at("mc").dump());
  }
  if (j.contains("output_dir")) c.output_dir = required<std::string>(j, "output_dir", "config");
  if (j.contains("format")) c.format = format_from_string(required<std::string>(j, "format", "config"));
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, {"parameter", "values"}, "sweep");
    c.sweep = SweepSpec{required<std::string>(s, "parameter", "sweep"),
                        required<std::vector<double>>(s, "values", "sweep")};
  }
  if (j.contains("propagate")) {
    const auto& p = j.at("propagate");
    check_keys(p, {"E", "Delta", "t", "m", "beta"}, "propagate");
    PropagateSpec spec;
    spec.energy = number_of(p, "E", "propagate");
    spec.tunnelling = number_of(p, "Delta", "propagate");
    spec.time = number_of(p, "t", "propagate");
    spec.slices = required<std::vector<int>>(p, "m", "propagate");
    if (p.contains("beta")) spec.beta = number_of(p, "beta", "propagate");
    c.propagate = spec;
  }
  c.validate();
  return c;
}

void apply_overrides(ExperimentConfig& config, const Overrides& o) {
  if (o.output_dir) config.output_dir = *o.output_dir;
  if (o.format) config.format = *o.format;
  if (o.trotter_n) {
    config.trotter_n = *o.trotter_n;
    if (config.propagate) config.propagate->slices = *o.trotter_n;
  }
  if (o.methods) {
    config.methods = *o.methods;
    if (config.has(Method::kMonteCarlo) && !config.mc) config.mc = McConfig::with_defaults(o.seed.value_or(1), 4, 20000);
    if (!config.has(Method::kMonteCarlo)) config.mc.reset();
  }
  if (o.seed && config.mc) config.mc->seed = *o.seed;
  config.validate();
}

// ------------------------------------------------------------------ tables

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    raise(ErrorKind::kNumeric, kModule, "row width does not match the " + name + " columns");
  }
  rows.push_back(std::move(row));
}

const Cell& Table::at(std::size_t row, std::string_view column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end() || row >= rows.size()) {
    invalid("no cell (" + std::to_string(row) + ", " + std::string(column) + ") in " + name);
  }
  return rows[row][static_cast<std::size_t>(it - columns.begin())];
}

double Table::number(std::size_t row, std::string_view column) const {
  const Cell& c = at(row, column);
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<long long>(&c)) return static_cast<double>(*i);
  invalid("cell " + std::string(column) + " is not numeric");
}

std::string Table::to_csv() const {
  std::ostringstream out;
  out << "# qcbridge." << name << " v" << kOutputSchemaVersion << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
    out << '\n';
  }
  return out.str();
}

std::string Table::to_json() const {
  ordered_json j;
  j["schema"] = "qcbridge." + name;
  j["schema_version"] = kOutputSchemaVersion;
  j["columns"] = columns;
  j["rows"] = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r = ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[columns[i]] = json_cell(row[i]);
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- commands

std::vector<std::pair<int, std::string>> cmd_map(const ExperimentConfig& config) {
  const auto& q = require_quantum(config, "map");
  require_trotter(config, "map");
  std::vector<std::pair<int, std::string>> out;
  for (int n : config.trotter_n) out.emplace_back(n, lattice_to_json(map_tfim(q, n)));
  return out;
}

Table cmd_exact(const ExperimentConfig& config) {
  const auto& q = require_quantum(config, "exact");
  Table t{"exact",
          {"sites", "J", "B", "boundary", "beta", "beta_source", "site", "m_x", "m_x_next", "c_x", "c_y", "c_z",
           "off_pattern_residual", "log_partition", "free_energy", "rho_min_eigenvalue", "concurrence",
           "negativity", "entangled", "entanglement_status"},
          {}};
  const auto ref = quantum_reference(q, config.site);
  const auto& c = ref.correlators;
  const auto m = measure(c);
  t.add_row({ll(q.sites), q.coupling, q.field, std::string(to_string(q.boundary)), q.beta, beta_source(config),
             ll(config.site), c.m_x, c.m_x_next, c.c_x, c.c_y, c.c_z, c.off_pattern_residual, ref.log_partition,
             -ref.log_partition / q.beta, m.min_eigenvalue, concurrence_cell(m), negativity_cell(m), entangled_cell(m),
             m.status});
  return t;
}

Table cmd_eval(const ExperimentConfig& config) {
  const auto& q = require_quantum(config, "eval");
  require_trotter(config, "eval");
  const auto methods = classical_methods(config, false);
  if (methods.empty()) invalid("eval needs enum or transfer-matrix among the methods");
  Table t{"eval",
          {"method", "n", "spins", "bonds", "log_prefactor", "log_z", "free_energy", "m_x", "m_x_next", "c_x",
           "c_y", "c_z", "rho_min_eigenvalue", "concurrence", "negativity", "entanglement_status"},
          {}};
  for (Method method : methods) {
    for (int n : config.trotter_n) {
      const auto lattice = map_tfim(q, n);
      const auto em = eval_method(method);
      double lz = 0.0;
      const auto v = expectations(lattice, correlator_insertions(lattice, config.site), em, &lz);
      CorrelatorSet c;
      c.m_x = v[0];
      c.m_x_next = v[1];
      c.c_x = v[2];
      c.c_y = v[3];
      c.c_z = v[4];
      c.provenance = provenance_of(em);
      const auto m = measure(c);
      const double log_prefactor = lattice.log_prefactor.real();
      t.add_row({std::string(to_string(method)), ll(n), static_cast<long long>(lattice.spin_count()),
                 static_cast<long long>(lattice.bond_count()), log_prefactor, lz, -(log_prefactor + lz) / q.beta,
                 c.m_x, c.m_x_next, c.c_x, c.c_y, c.c_z, m.min_eigenvalue, concurrence_cell(m), negativity_cell(m),
                 m.status});
    }
  }
  return t;
}

Table cmd_mc(const ExperimentConfig& config, std::vector<std::pair<std::string, std::string>>* traces) {
  const auto& q = require_quantum(config, "mc");
  require_trotter(config, "mc");
  if (!config.mc) invalid("mc needs an 'mc' block (or --method mc)");
  const auto& mc = *config.mc;
  Table t{"mc",
          {"n", "observable", "mean", "std_err", "n_samples", "autocorrelation_hint", "max_abs_sample", "seed",
           "chains", "sweeps", "burn_in", "bins"},
          {}};
  for (int n : config.trotter_n) {
    const auto lattice = map_tfim(q, n);
    const auto estimates = estimate_many(lattice, correlator_insertions(lattice, config.site), mc);
    for (std::size_t k = 0; k < estimates.size(); ++k) {
      const auto& e = estimates[k];
      t.add_row({ll(n), std::string(kCorrelatorNames[k]), e.mean, e.std_err, static_cast<long long>(e.n_samples),
                 e.autocorrelation_hint, e.max_abs_sample, std::to_string(mc.seed), ll(mc.chains), ll(mc.sweeps),
                 ll(mc.burn_in), ll(mc.bins)});
      if (traces) {
        traces->emplace_back("mc_bins_n" + std::to_string(n) + "_" + kCorrelatorNames[k] + ".csv",
                             bin_trace_csv(e));
      }
    }
  }
  return t;
}

Comparison cmd_compare(const ExperimentConfig& config) {
  const auto& q = require_quantum(config, "compare");
  require_trotter(config, "compare");
  const auto methods = classical_methods(config, true);
  if (!config.has(Method::kExactQuantum) || methods.empty()) {
    invalid("compare needs exact-quantum and at least one classical method");
  }

  std::vector<std::string> columns{"method", "n"};
  for (const char* name : kCorrelatorNames) {
    for (const char* suffix : {"_classical", "_std_err", "_quantum", "_abs_err", "_ratio"}) {
      columns.push_back(std::string(name) + suffix);
    }
  }
  for (const char* extra : {"free_energy_classical", "free_energy_quantum", "free_energy_abs_err",
                            "rho_min_eigenvalue_classical", "concurrence_classical", "concurrence_quantum", "negativity_classical",
                            "negativity_quantum", "entanglement_status", "beta", "beta_source"}) {
    columns.emplace_back(extra);
  }
  Comparison out{{"compare", columns, {}}, {"timing", {"method", "n", "runtime_ms"}, {}}};

  const auto ref = quantum_reference(q, config.site);
  const auto quantum_values = ref.correlators.values();
  const auto quantum_measures = measure(ref.correlators);
  const double quantum_free = -ref.log_partition / q.beta;

  for (Method method : methods) {
    std::map<int, std::array<double, 5>> errors;
    std::vector<std::vector<Cell>> rows;
    for (int n : config.trotter_n) {
      const auto start = std::chrono::steady_clock::now();
      const auto lattice = map_tfim(q, n);
      CorrelatorSet c;
      Cell free_classical;
      Cell free_err;
      if (method == Method::kMonteCarlo) {
        c = mc_correlators(lattice, config.site, *config.mc);
      } else {
        double lz = 0.0;
        const auto em = eval_method(method);
        const auto v = expectations(lattice, correlator_insertions(lattice, config.site), em, &lz);
        c.m_x = v[0];
        c.m_x_next = v[1];
        c.c_x = v[2];
        c.c_y = v[3];
        c.c_z = v[4];
        c.provenance = provenance_of(em);
        const double f = -(lattice.log_prefactor.real() + lz) / q.beta;
        free_classical = f;
        free_err = std::abs(f - quantum_free);
      }
      const auto m = measure(c);
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

      std::vector<Cell> row{std::string(to_string(method)), ll(n)};
      std::array<double, 5> err{};
      const auto values = c.values();
      for (std::size_t k = 0; k < 5; ++k) {
        err[k] = std::abs(values[k] - quantum_values[k]);
        row.insert(row.end(), {values[k], c.std_err[k], quantum_values[k], err[k], Cell{}});
      }
      errors[n] = err;
      row.insert(row.end(), {free_classical, quantum_free, free_err, m.min_eigenvalue, concurrence_cell(m),
                             concurrence_cell(quantum_measures), negativity_cell(m),
                             negativity_cell(quantum_measures), m.status, q.beta, beta_source(config)});
      rows.push_back(std::move(row));
      out.timing.add_row({std::string(to_string(method)), ll(n), ms});
    }
    // err(n) / err(2n), left empty when 2n is not part of the run.
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const int n = config.trotter_n[r];
      const auto twice = errors.find(2 * n);
      if (twice == errors.end()) continue;
      for (std::size_t k = 0; k < 5; ++k) {
        if (twice->second[k] > 0.0) rows[r][2 + 5 * k + 4] = errors[n][k] / twice->second[k];
      }
    }
    for (auto& row : rows) out.rows.add_row(std::move(row));
  }
  return out;
}

Table cmd_propagate(const ExperimentConfig& config) {
  if (!config.propagate) invalid("propagate needs a 'propagate' block");
  const auto& p = *config.propagate;
  Table t{"propagate",
          {"m", "E", "Delta", "t", "max_abs_deviation", "beta", "thermal_trace", "thermal_exact",
           "thermal_abs_deviation"},
          {}};
  const Eigen::Matrix2cd direct = qubit_exponential(p.energy, p.tunnelling, std::complex<double>(0.0, p.time));
  for (int m : p.slices) {
    const Eigen::Matrix2cd chain = qubit_chain_propagator(p.energy, p.tunnelling, p.time, m);
    const double deviation = (chain - direct).cwiseAbs().maxCoeff();
    std::vector<Cell> row{ll(m), p.energy, p.tunnelling, p.time, deviation};
    if (p.beta) {
      const double trace = qubit_chain_partition(p.energy, p.tunnelling, *p.beta, m);
      const double exact = 2.0 * std::cosh(*p.beta * std::hypot(p.energy, p.tunnelling));
      row.insert(row.end(), {*p.beta, trace, exact, std::abs(trace - exact)});
    } else {
      row.insert(row.end(), {Cell{}, Cell{}, Cell{}, Cell{}});
    }
    t.add_row(std::move(row));
  }
  return t;
}

Table cmd_sweep(const ExperimentConfig& config) {
  const auto& base = require_quantum(config, "sweep");
  require_trotter(config, "sweep");
  if (!config.sweep) invalid("sweep needs a 'sweep' block");
  const auto methods = classical_methods(config, true);
  if (methods.empty()) invalid("sweep needs a classical method for the second route");
  const Method method = methods.front();
  const int n = config.trotter_n.back();

  Table t{"sweep",
          {"parameter", "value", "J", "B", "beta", "beta_source", "method", "n", "concurrence_quantum",
           "negativity_quantum", "entangled_quantum", "rho_min_eigenvalue_classical", "concurrence_classical",
           "negativity_classical", "entangled_classical", "entanglement_status"},
          {}};
  for (double value : config.sweep->values) {
    QuantumChainSpec q = base;
    ExperimentConfig point = config;
    if (config.sweep->parameter == "B_over_J") {
      if (base.coupling == 0.0) invalid("a B_over_J sweep needs J != 0");
      q.field = value * base.coupling;
      if (config.beta_is_proxy) q.beta = ground_state_proxy_beta(q.coupling, q.field);
    } else {
      q.beta = value;
      point.beta_is_proxy = false;
    }
    q.validate();
    const auto quantum = measure(quantum_reference(q, config.site).correlators);
    const auto classical = measure(classical_correlators(method, map_tfim(q, n), config));
    t.add_row({config.sweep->parameter, value, q.coupling, q.field, q.beta, beta_source(point),
               std::string(to_string(method)), ll(n), concurrence_cell(quantum), negativity_cell(quantum),
               entangled_cell(quantum), classical.min_eigenvalue, concurrence_cell(classical), negativity_cell(classical),
               entangled_cell(classical), classical.status});
  }
  return t;
}

// -------------------------------------------------------------------- run

namespace {

void write_file(const std::filesystem::path& path, const std::string& text, std::ostream& out) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  f.close();
  if (!f) raise(ErrorKind::kIo, kModule, "cannot write " + path.string());
  out << path.string() << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) raise(ErrorKind::kIo, kModule, "cannot read config " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path prepare_output(const ExperimentConfig& config) {
  const std::filesystem::path dir(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    raise(ErrorKind::kIo, kModule, "cannot create output directory " + dir.string());
  }
  return dir;
}

std::string render(const Table& t, Format f) { return f == Format::kCsv ? t.to_csv() : t.to_json(); }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maps transverse-field Ising chains onto classical Ising lattices and compares both sides."};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::vector<int> n_list;
  std::vector<std::string> method_list;
  std::optional<int> workers;
  bool trace = false;

  const std::vector<std::pair<const char*, const char*>> commands{
      {"map", "write the classical lattice JSON for every Trotter number"},
      {"exact", "exact quantum correlators and entanglement"},
      {"eval", "exact classical evaluation (enumeration / transfer matrix)"},
      {"mc", "Monte Carlo estimates of the correlator insertions"},
      {"compare", "classical routes against the quantum reference, with convergence ratios"},
      {"propagate", "single-qubit chain contraction against the direct exponential"},
      {"sweep", "entanglement from both routes over a B/J or beta grid"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "Monte Carlo seed (overrides mc.seed)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--n", n_list, "comma-separated Trotter numbers (m list for propagate)")->delimiter(',');
    sub->add_option("--method", method_list, "comma-separated methods")->delimiter(',');
    sub->add_option("--workers", workers, "worker threads (sets BRIDGE_WORKERS)")->check(CLI::PositiveNumber);
    if (std::string_view(name) == "mc") sub->add_flag("--trace", trace, "also write per-bin means as CSV");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "bridge: " << e.what() << '\n';
    return 2;
  }

  try {
    if (workers) setenv("BRIDGE_WORKERS", std::to_string(*workers).c_str(), 1);
    auto config = config_from_json(read_file(config_path));
    Overrides o;
    o.output_dir = out_dir;
    o.seed = seed;
    if (format) o.format = format_from_string(*format);
    if (!n_list.empty()) o.trotter_n = n_list;
    if (!method_list.empty()) {
      std::vector<Method> ms;
      for (const auto& s : method_list) ms.push_back(method_from_string(s));
      o.methods = ms;
    }
    apply_overrides(config, o);

    const std::string command = app.get_subcommands().front()->get_name();
    const std::string ext = extension(config.format);
    if (command == "map") {
      const auto lattices = cmd_map(config);
      const auto dir = prepare_output(config);
      for (const auto& [n, text] : lattices) write_file(dir / ("lattice_n" + std::to_string(n) + ".json"), text, out);
    } else if (command == "compare") {
      const auto result = cmd_compare(config);
      const auto dir = prepare_output(config);
      write_file(dir / ("compare." + ext), render(result.rows, config.format), out);
      write_file(dir / ("timing." + ext), render(result.timing, config.format), out);
    } else if (command == "mc") {
      std::vector<std::pair<std::string, std::string>> traces;
      const auto table = cmd_mc(config, trace ? &traces : nullptr);
      const auto dir = prepare_output(config);
      write_file(dir / ("mc." + ext), render(table, config.format), out);
      for (const auto& [file, text] : traces) write_file(dir / file, text, out);
    } else {
      Table table;
      if (command == "exact") table = cmd_exact(config);
      if (command == "eval") table = cmd_eval(config);
      if (command == "propagate") table = cmd_propagate(config);
      if (command == "sweep") table = cmd_sweep(config);
      const auto dir = prepare_output(config);
      write_file(dir / (command + "." + ext), render(table, config.format), out);
    }
  } catch (const BridgeError& e) {
    err << "bridge: " << e.what() << '\n';
    return e.exit_code();
  }
  return 0;
}

}  // namespace qcbridge::cli
