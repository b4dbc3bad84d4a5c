#include "slspec/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

namespace slspec {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::InvalidInput, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::InvalidInput, what + ": " + e.what());
  }
}

std::string number(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return std::signbit(x) ? "-0.0" : "0.0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void emit(const json& j, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map keeps keys sorted
        if (!first) out += ",\n";
        first = false;
        out += inner + json(it.key()).dump() + ": ";
        emit(it.value(), indent + 1, out);
      }
      out += "\n" + pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && !v.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          emit(j[i], indent + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        emit(j[i], indent + 1, out);
      }
      out += "\n" + pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += number(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::vector<cplx> complex_list(const json& j, const char* what) {
  if (!j.is_array()) fail(ErrorCode::InvalidInput, std::string(what) + " must be an array");
  std::vector<cplx> out;
  for (const auto& v : j) out.push_back(complex_from_json(v));
  return out;
}

const char* kind_case(DegenerateVariant v) {
  return v == DegenerateVariant::CauchyLike ? "CauchyLike" : "VisualForm";
}

}  // namespace

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(ErrorCode::InvalidInput, "expected a number or [re, im], got " + j.dump());
}

Potential potential_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::InvalidInput, "potential document must be an object");
  ClosedForm cf;
  if (auto it = j.find("closed_form"); it != j.end() && !it->is_null()) {
    if (it->is_string() && it->get<std::string>() == "zero") {
      cf.kind = ClosedForm::Kind::Zero;
    } else if (it->is_object() && it->contains("poly")) {
      cf.kind = ClosedForm::Kind::Polynomial;
      cf.poly = complex_list(it->at("poly"), "closed_form.poly");
      if (cf.poly.empty()) fail(ErrorCode::InvalidInput, "closed_form.poly is empty");
    } else {
      fail(ErrorCode::InvalidInput, "closed_form must be \"zero\", {\"poly\": [...]} or null");
    }
  }
  std::vector<EndpointDerivative> derivs;
  if (auto it = j.find("endpoint_derivs"); it != j.end() && !it->is_null()) {
    for (const auto& e : *it) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer()) {
        fail(ErrorCode::InvalidInput, "endpoint_derivs entries are [k, [re, im], [re, im]]");
      }
      derivs.push_back({e[0].get<int>(), complex_from_json(e[1]), complex_from_json(e[2])});
    }
  }
  if (!j.contains("grid")) {
    // closed form alone: sample it on the default grid
    if (cf.kind == ClosedForm::Kind::Zero) return Potential::zero();
    if (cf.kind == ClosedForm::Kind::Polynomial) return Potential::polynomial(cf.poly);
    fail(ErrorCode::InvalidInput, "potential needs \"grid\" and \"values\" or a closed form");
  }
  std::vector<double> grid;
  for (const auto& x : j.at("grid")) {
    if (!x.is_number()) fail(ErrorCode::InvalidInput, "grid entries must be numbers");
    grid.push_back(x.get<double>());
  }
  if (!j.contains("values")) fail(ErrorCode::InvalidInput, "potential needs \"values\"");
  return Potential(std::move(grid), complex_list(j.at("values"), "values"), cf,
                   std::move(derivs));
}

Potential potential_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> grid;
  std::vector<cplx> values;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    for (char& ch : line) {
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    }
    std::istringstream row(line);
    double x = 0.0, re = 0.0, im = 0.0;
    if (!(row >> x >> re)) {
      if (first) {
        first = false;
        continue;
      }
      fail(ErrorCode::InvalidInput, "malformed potential CSV row: " + line);
    }
    first = false;
    if (!(row >> im)) im = 0.0;
    grid.push_back(x);
    values.emplace_back(re, im);
  }
  return Potential(std::move(grid), std::move(values));
}

Potential load_potential(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".csv") return potential_from_csv(text);
  return potential_from_json(parse_json(text, path.string()));
}

BcMatrix bc_from_json(const json& j) {
  const json* rows = &j;
  if (j.is_object()) {
    if (!j.contains("rows")) fail(ErrorCode::InvalidInput, "boundary matrix needs \"rows\"");
    rows = &j.at("rows");
  }
  if (!rows->is_array() || rows->size() != 2) {
    fail(ErrorCode::InvalidInput, "boundary matrix needs exactly two rows");
  }
  std::array<BcMatrix::Row, 2> r;
  for (std::size_t i = 0; i < 2; ++i) {
    const json& row = (*rows)[i];
    if (!row.is_array() || row.size() != 4) {
      fail(ErrorCode::InvalidInput, "each boundary row has four entries");
    }
    for (std::size_t k = 0; k < 4; ++k) r[i][k] = complex_from_json(row[k]);
  }
  return BcMatrix(r[0], r[1]);
}

BcMatrix load_bc(const std::filesystem::path& path) {
  return bc_from_json(parse_json(read_file(path), path.string()));
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const BcMatrix& a) {
  json rows = json::array();
  for (int i = 0; i < 2; ++i) {
    json row = json::array();
    for (int k = 0; k < 4; ++k) row.push_back(to_json(a(i, k)));
    rows.push_back(row);
  }
  return {{"rows", rows}};
}

json to_json(const Minors& m) {
  return {{"A12", to_json(m.a12)}, {"A13", to_json(m.a13)}, {"A14", to_json(m.a14)},
          {"A23", to_json(m.a23)}, {"A24", to_json(m.a24)}, {"A34", to_json(m.a34)}};
}

json to_json(const BcClass& c) {
  json j;
  j["kind"] = kind_name(c.kind);
  if (const auto* r = std::get_if<StrengthenedRegular>(&c.kind)) j["group"] = r->group;
  if (const auto* r = std::get_if<RegularNotStrengthened>(&c.kind)) {
    j["theta"] = r->theta;
    j["subtype"] = subtype_name(r->subtype);
  }
  if (const auto* r = std::get_if<Irregular>(&c.kind)) j["variant"] = r->variant;
  if (const auto* r = std::get_if<Degenerate>(&c.kind)) {
    j["variant"] = kind_case(r->variant);
    if (r->variant == DegenerateVariant::VisualForm) j["d"] = to_json(r->d);
  }
  json p = json::object();
  const CanonicalParameters& cp = c.params;
  if (cp.theta) p["theta"] = *cp.theta;
  if (cp.a14) p["a14"] = to_json(*cp.a14);
  if (cp.b0) p["b0"] = to_json(*cp.b0);
  if (cp.b1) p["b1"] = to_json(*cp.b1);
  if (cp.a0) p["a0"] = to_json(*cp.a0);
  if (cp.d) p["d"] = to_json(*cp.d);
  j["parameters"] = p;
  j["minors"] = to_json(c.minors);
  j["canonical"] = to_json(c.canonical)["rows"];
  return j;
}

json to_json(const EigenvalueRecord& r) {
  json j = {{"mu", to_json(r.mu)},
            {"lambda", to_json(r.lambda)},
            {"mult", r.multiplicity},
            {"residual", r.residual},
            {"verified", r.verified},
            {"box", json::array({r.box.re0, r.box.re1, r.box.im0, r.box.im1})}};
  if (r.index_hint) j["index_hint"] = json::array({r.index_hint->first, r.index_hint->second});
  return j;
}

json to_json(const SpectrumReport& r) {
  json ev = json::array();
  for (const auto& rec : r.records) ev.push_back(to_json(rec));
  return {{"classification", to_string(r.classification)},
          {"eigenvalues", ev},
          {"region", json::array({r.scan_region.re0, r.scan_region.re1, r.scan_region.im0,
                                  r.scan_region.im1})},
          {"notes", r.notes},
          {"bisections", r.bisections},
          {"winding_consistent", r.winding_consistent},
          {"max_multiplicity", r.max_multiplicity}};
}

json to_json(const BasisDiagnostics& d) {
  return {{"gram_cond", d.gram_cond},
          {"norm_products", d.norm_products},
          {"kernel_sup", d.kernel_sup}};
}

json to_json(const DegenerateClassification& c) {
  json j = {{"d", to_json(c.d)},
            {"symmetric", c.symmetric},
            {"classification", to_string(c.kind)},
            {"symmetry_defect", c.symmetry_defect}};
  if (c.probe_deviation) j["probe_deviation"] = *c.probe_deviation;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json to_json(const NonclassicalReport& r) {
  json j = to_json(r.spectrum);
  j["growth"] = {{"mu_abs", r.growth.mu_abs},
                 {"ratios", r.growth.ratios},
                 {"c1_hat", r.growth.c1_hat},
                 {"c2_hat", r.growth.c2_hat}};
  j["ratio_min_per_block"] = r.ratio_min_per_block;
  j["ratio_max_per_block"] = r.ratio_max_per_block;
  if (!r.im_growth.empty()) j["im_growth"] = r.im_growth;
  j["winding_checked"] = r.winding_checked;
  return j;
}

std::string dump_deterministic(const json& j) {
  std::string out;
  emit(j, 0, out);
  out += "\n";
  return out;
}

std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path dir =
      path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  const std::filesystem::path tmp =
      dir / ("." + path.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::InvalidInput, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      fail(ErrorCode::InvalidInput, "write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorCode::InvalidInput, "cannot rename into " + path.string());
  }
}

}  // namespace slspec
