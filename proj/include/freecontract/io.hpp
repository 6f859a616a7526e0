#pragma once

// JSON and CSV encodings for measures, spectra and reports.
//   measure: {"atoms":[{"x": <real>, "w": <real>}, ...]}
//   spec:    {"k": <int>, "eigs":[{"xi": <real>, "d": <int>}, ...]}
// Readers reject non-finite numbers and throw DomainError on malformed input.

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

#include "freecontract/additivity.hpp"
#include "freecontract/freepower.hpp"
#include "freecontract/measures.hpp"
#include "freecontract/tnorm.hpp"

namespace fc::io {

using nlohmann::json;

json read_json_file(const std::filesystem::path& path);

AtomicMeasure measure_from_json(const json& j);
json to_json(const AtomicMeasure& mu);

HermitianSpec spec_from_json(const json& j);
json to_json(const HermitianSpec& spec);

// Components, atoms, x3, x4, masses and an evenly spaced density table with
// `grid` points over [support_min, support_max] (grid = 0 omits the table).
json to_json(const FreePowerResult& r, int grid);

json to_json(const TNormReport& r);
std::string tnorm_csv_header();
std::string tnorm_csv_row(const TNormReport& r);

json to_json(const ViolationReport& r);

// FNV-1a 64 over the compact JSON dump of the spec.
std::uint64_t spec_hash(const HermitianSpec& spec);

// Shortest round-trip decimal for a double.
std::string format_double(double v);

}  // namespace fc::io
