#include "freecontract/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "freecontract/error.hpp"

namespace fc::io {

namespace {

double finite_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw DomainError(std::string("json: missing numeric field \"") + key + "\"");
  }
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) {
    throw DomainError(std::string("json: field \"") + key + "\" is not finite");
  }
  return v;
}

int integer_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw DomainError(std::string("json: missing integer field \"") + key + "\"");
  }
  return j.at(key).get<int>();
}

const json& array_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_array()) {
    throw DomainError(std::string("json: expected an object with array \"") + key + "\"");
  }
  return j.at(key);
}

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DomainError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

AtomicMeasure measure_from_json(const json& j) {
  std::vector<Atom> atoms;
  for (const auto& a : array_field(j, "atoms")) {
    atoms.push_back({finite_number(a, "x"), finite_number(a, "w")});
  }
  return AtomicMeasure::make(atoms);
}

json to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"x", a.x}, {"w", a.w}});
  return {{"atoms", atoms}};
}

HermitianSpec spec_from_json(const json& j) {
  const int k = integer_field(j, "k");
  std::vector<Eigenvalue> eigs;
  for (const auto& e : array_field(j, "eigs")) {
    eigs.push_back({finite_number(e, "xi"), integer_field(e, "d")});
  }
  return HermitianSpec::make(k, eigs);
}

json to_json(const HermitianSpec& spec) {
  json eigs = json::array();
  for (const auto& e : spec.eigs()) eigs.push_back({{"xi", e.xi}, {"d", e.d}});
  return {{"k", spec.k()}, {"eigs", eigs}};
}

json to_json(const FreePowerResult& r, int grid) {
  json comps = json::array();
  for (const auto& c : r.support_components()) comps.push_back({c.lo, c.hi});
  json bt = json::array();
  for (const auto& c : r.bt_components()) bt.push_back({c.lo, c.hi});
  json atoms = json::array();
  for (const auto& a : r.atoms()) atoms.push_back({{"x", a.x}, {"w", a.w}});
  json out = {{"T", r.T()},
              {"support_components", comps},
              {"atoms", atoms},
              {"bt_components", bt},
              {"boundary_roots", std::vector<double>(r.boundary_roots().begin(),
                                                     r.boundary_roots().end())},
              {"x3", r.x3()},
              {"x4", r.x4()},
              {"ac_mass", r.ac_mass()},
              {"atomic_mass", r.atomic_mass()}};
  if (grid > 0) {
    json table = json::array();
    const double lo = r.support_min(), hi = r.support_max();
    for (int i = 0; i < grid; ++i) {
      const double x = grid == 1 ? lo : lo + (hi - lo) * i / (grid - 1);
      table.push_back({x, r.density(x)});
    }
    out["density"] = table;
  }
  return out;
}

json to_json(const TNormReport& r) {
  return {{"t", r.t},
          {"exact", r.exact},
          {"upper", r.upper_thm},
          {"upper_abs", r.upper_thm_abs},
          {"lower", optional_number(r.lower_thm)},
          {"kargin", optional_number(r.kargin)},
          {"asymptote", r.asymptote},
          {"atom_dominated", r.atom_dominated}};
}

std::string tnorm_csv_header() {
  return "t,exact,upper,lower,kargin,asymptote,atom_dominated";
}

std::string tnorm_csv_row(const TNormReport& r) {
  std::ostringstream os;
  os << format_double(r.t) << ',' << format_double(r.exact) << ','
     << format_double(r.upper_thm) << ','
     << (r.lower_thm ? format_double(*r.lower_thm) : "") << ','
     << (r.kargin ? format_double(*r.kargin) : "") << ','
     << format_double(r.asymptote) << ',' << (r.atom_dominated ? "true" : "false");
  return os.str();
}

json to_json(const ViolationReport& r) {
  return {{"k", r.k},
          {"r", r.r},
          {"t", r.t},
          {"g", r.g},
          {"product_bound", r.product_bound},
          {"single_lower", r.single_lower},
          {"violated", r.violated}};
}

std::uint64_t spec_hash(const HermitianSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(spec).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace fc::io
