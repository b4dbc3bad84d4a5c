#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "slspec/bc.hpp"
#include "slspec/degenerate.hpp"
#include "slspec/potential.hpp"
#include "slspec/root_functions.hpp"
#include "slspec/spectrum.hpp"

namespace slspec {

using json = nlohmann::json;

/// {"grid": [...], "values": [[re, im], ...], "closed_form": "zero" |
/// {"poly": [...]} | null, "endpoint_derivs": [[k, [re, im], [re, im]], ...]}
Potential potential_from_json(const json& j);
/// Columns x, re, im; a non-numeric first line is taken as a header.
Potential potential_from_csv(const std::string& text);
/// Dispatches on the extension: .csv, otherwise JSON.
Potential load_potential(const std::filesystem::path& path);

/// {"rows": [[[re, im] x 4], [[re, im] x 4]]}; plain numbers are accepted
/// for real entries.
BcMatrix bc_from_json(const json& j);
BcMatrix load_bc(const std::filesystem::path& path);

cplx complex_from_json(const json& j);
json to_json(cplx z);
json to_json(const BcMatrix& a);
json to_json(const Minors& m);
json to_json(const BcClass& c);
json to_json(const EigenvalueRecord& r);
json to_json(const SpectrumReport& r);
json to_json(const BasisDiagnostics& d);
json to_json(const DegenerateClassification& c);
json to_json(const NonclassicalReport& r);

/// Sorted keys, 17 significant digits, non-finite numbers as null, two-space
/// indentation; byte-stable for equal documents.
std::string dump_deterministic(const json& j);

/// 12 significant digits.
std::string csv_number(double x);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace slspec
