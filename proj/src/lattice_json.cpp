#include "qcbridge/lattice_json.hpp"

#include <sstream>

#include <json.hpp>

#include "qcbridge/errors.hpp"
#include "qcbridge/format.hpp"

namespace qcbridge {
namespace {

constexpr const char* kModule = "trotter_map";

std::string number(std::complex<double> z) {
  if (z.imag() == 0.0) return format_double17(z.real());
  return "{\"re\": " + format_double17(z.real()) + ", \"im\": " + format_double17(z.imag()) + "}";
}

std::complex<double> read_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) raise(ErrorKind::kValidation, kModule, std::string("lattice JSON lacks '") + key + "'");
  const auto& v = j.at(key);
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_object() && v.contains("re") && v.contains("im")) {
    return {v.at("re").get<double>(), v.at("im").get<double>()};
  }
  raise(ErrorKind::kValidation, kModule, std::string("lattice field '") + key + "' is not a number");
}

}  // namespace

std::string lattice_to_json(const ClassicalLatticeSpec& lattice) {
  std::ostringstream out;
  out << "{\n"
      << "  \"schema\": \"qcbridge.lattice\",\n"
      << "  \"schema_version\": " << kLatticeSchemaVersion << ",\n"
      << "  \"columns\": " << lattice.columns << ",\n"
      << "  \"rows\": " << lattice.rows << ",\n"
      << "  \"spins\": " << lattice.spin_count() << ",\n"
      << "  \"bonds\": " << lattice.bond_count() << ",\n"
      << "  \"spatial_coupling\": " << number(lattice.spatial_coupling) << ",\n"
      << "  \"temporal_coupling\": " << number(lattice.temporal_coupling) << ",\n"
      << "  \"log_prefactor\": " << number(lattice.log_prefactor) << ",\n"
      << "  \"boundary_space\": \"" << to_string(lattice.boundary_space) << "\",\n"
      << "  \"boundary_time\": \"periodic\"";
  if (lattice.origin) {
    const auto& o = *lattice.origin;
    out << ",\n  \"origin\": {\"sites\": " << o.sites << ", \"J\": " << format_double17(o.coupling)
        << ", \"B\": " << format_double17(o.field) << ", \"beta\": " << format_double17(o.beta) << "}";
  }
  out << "\n}\n";
  return out.str();
}

ClassicalLatticeSpec lattice_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::kValidation, kModule, std::string("malformed lattice JSON: ") + e.what());
  }
  try {
    if (j.value("schema_version", 0) != kLatticeSchemaVersion) {
      raise(ErrorKind::kValidation, kModule, "unsupported lattice schema_version");
    }
    if (j.value("boundary_time", std::string("periodic")) != "periodic") {
      raise(ErrorKind::kValidation, kModule, "boundary_time must be periodic");
    }
    ClassicalLatticeSpec lattice;
    lattice.columns = j.at("columns").get<int>();
    lattice.rows = j.at("rows").get<int>();
    lattice.spatial_coupling = read_number(j, "spatial_coupling");
    lattice.temporal_coupling = read_number(j, "temporal_coupling");
    lattice.log_prefactor = read_number(j, "log_prefactor");
    lattice.boundary_space = boundary_from_string(j.at("boundary_space").get<std::string>());
    if (j.contains("origin")) {
      const auto& o = j.at("origin");
      lattice.origin = LatticeOrigin{o.at("sites").get<int>(), o.at("J").get<double>(),
                                     o.at("B").get<double>(), o.at("beta").get<double>()};
    }
    lattice.validate();
    return lattice;
  } catch (const nlohmann::json::exception& e) {
    raise(ErrorKind::kValidation, kModule, std::string("bad lattice JSON: ") + e.what());
  }
}

}  // namespace qcbridge
