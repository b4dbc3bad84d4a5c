#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "slspec/chardet.hpp"
#include "slspec/degenerate.hpp"
#include "slspec/parallel.hpp"
#include "slspec/root_functions.hpp"
#include "slspec/spectrum.hpp"

namespace slspec::cli {

namespace {

const std::set<std::string> kCommands = {"classify", "det-curve", "spectrum", "rootfns",
                                         "degenerate", "example", "report", "validate"};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(ErrorCode::InvalidInput, "not a number: '" + s + "'");
  return v;
}

bool is_keyword(const std::string& spec, std::initializer_list<const char*> words) {
  const std::string head = spec.substr(0, spec.find(':'));
  for (const char* w : words) {
    if (head == w) return true;
  }
  return false;
}

bool potential_inline(const std::string& spec) {
  return is_keyword(spec, {"zero", "const", "poly"});
}

bool bc_inline(const std::string& spec) {
  return is_keyword(spec, {"dirichlet", "neumann", "periodic", "antiperiodic", "degenerate", "rows"});
}

std::string payload(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) fail(ErrorCode::InvalidInput, "'" + spec + "' needs a value after ':'");
  return spec.substr(colon + 1);
}

void emit_text(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) {
    out << text;
  } else {
    write_atomic(cfg.out, text);
  }
}

DetOptions det_options(const RunConfig& cfg) {
  DetOptions opt;
  opt.ode.tol = cfg.tol;
  opt.force_integration = cfg.force_integration;
  return opt;
}

Rect clipped(Rect r) {
  r.re0 = std::max(r.re0, 0.0);
  return r;
}

std::optional<cplx> degenerate_d(const RunConfig& cfg, const BcMatrix& a) {
  if (!cfg.d.empty()) return parse_complex(cfg.d);
  const BcClass cls = classify(a);
  if (const auto* deg = std::get_if<Degenerate>(&cls.kind)) {
    if (deg->variant == DegenerateVariant::VisualForm) return deg->d;
    return cplx{};
  }
  return std::nullopt;
}

json chain_json(const RootChain& ch) {
  json j = {{"mu", to_json(ch.eigen.mu)},
            {"mult", ch.eigen.multiplicity},
            {"branch", ch.branch},
            {"order", ch.order()},
            {"boundary_residual", ch.boundary_residual},
            {"ode_residual", ch.ode_residual},
            {"cross_check", ch.cross_check}};
  if (!ch.note.empty()) j["note"] = ch.note;
  return j;
}

// Root system, dual system and basis diagnostics for a located spectrum.
json root_block(const RunConfig& cfg, const Potential& q, const BcMatrix& a,
                const SpectrumReport& rep) {
  RootOptions ropt;
  ropt.ode.tol = cfg.tol;
  const std::vector<RootChain> chains = root_system(q, a, rep, ropt);
  json j;
  json cj = json::array();
  for (const auto& ch : chains) cj.push_back(chain_json(ch));
  j["chains"] = cj;
  if (!cfg.trace_dir.empty()) {
    std::filesystem::create_directories(cfg.trace_dir);
    for (std::size_t i = 0; i < chains.size(); ++i) {
      for (std::size_t p = 0; p < chains[i].chain.size(); ++p) {
        std::ostringstream os;
        write_trace_csv(os, chains[i].chain[p]);
        const std::string name =
            "chain" + std::to_string(i) + "_link" + std::to_string(p) + ".csv";
        write_atomic(std::filesystem::path(cfg.trace_dir) / name, os.str());
      }
    }
  }
  if (chains.size() < 2) {
    j["notes"] = json::array({"fewer than two chains; no dual system"});
    return j;
  }
  const BiorthogonalPair pair = dual_system(q, a, chains, ropt);
  j["gram_residual"] = pair.gram_residual;
  j["notes"] = pair.notes;
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(cfg.n), pair.u.size());
  j["diagnostics"] = to_json(basis_diagnostics(pair, n));
  j["diagnostics"]["N"] = n;
  return j;
}

int estimate_drop_prefix(ProductKind kind, int k_max) {
  const ProductSpec full = make_product_spec(kind, std::max(k_max, 2048), 0, false);
  std::vector<double> xs;
  for (int i = 0; i <= 8000; ++i) xs.push_back(128.0 * i / 8000.0);
  const GrowthBound g = growth_bound_check(full, xs, 0);
  return std::clamp(g.empirical_m, 0, k_max - 1);
}

int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  const BcMatrix a = make_bc(cfg.bc);
  json j = to_json(classify(a));
  if (auto d = degenerate_d(cfg, a)) {
    j["degenerate"] = to_json(classify_degenerate(make_potential(cfg.potential), *d));
  }
  emit_text(cfg, out, dump_deterministic(j));
  return kExitOk;
}

int cmd_det_curve(const RunConfig& cfg, std::ostream& out) {
  const DetEvaluator ev(make_potential(cfg.potential), make_bc(cfg.bc), det_options(cfg));
  const Rect r = cfg.region;
  const auto nre = static_cast<std::size_t>(cfg.grid_re);
  const auto nim = static_cast<std::size_t>(cfg.grid_im);
  std::vector<cplx> mu(nre * nim), val(nre * nim);
  for (std::size_t i = 0; i < nim; ++i) {
    for (std::size_t k = 0; k < nre; ++k) {
      const double tr = nre > 1 ? static_cast<double>(k) / static_cast<double>(nre - 1) : 0.0;
      const double ti = nim > 1 ? static_cast<double>(i) / static_cast<double>(nim - 1) : 0.0;
      mu[i * nre + k] = {r.re0 + tr * r.width(), r.im0 + ti * r.height()};
    }
  }
  parallel_for(mu.size(), [&](std::size_t i) { val[i] = ev(mu[i]); });
  std::string text = "re_mu,im_mu,re_delta,im_delta\n";
  for (std::size_t i = 0; i < mu.size(); ++i) {
    text += csv_number(mu[i].real()) + "," + csv_number(mu[i].imag()) + "," +
            csv_number(val[i].real()) + "," + csv_number(val[i].imag()) + "\n";
  }
  emit_text(cfg, out, text);
  return kExitOk;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const DetEvaluator ev(make_potential(cfg.potential), make_bc(cfg.bc), det_options(cfg));
  const SpectrumReport rep = locate_spectrum(ev, clipped(cfg.region), cfg.max_refine);
  if (cfg.emit == "csv") {
    std::string text = "re_mu,im_mu,re_lambda,im_lambda,mult,residual\n";
    for (const auto& rec : rep.records) {
      text += csv_number(rec.mu.real()) + "," + csv_number(rec.mu.imag()) + "," +
              csv_number(rec.lambda.real()) + "," + csv_number(rec.lambda.imag()) + "," +
              std::to_string(rec.multiplicity) + "," + csv_number(rec.residual) + "\n";
    }
    emit_text(cfg, out, text);
  } else {
    emit_text(cfg, out, dump_deterministic(to_json(rep)));
  }
  return kExitOk;
}

int cmd_rootfns(const RunConfig& cfg, std::ostream& out) {
  const Potential q = make_potential(cfg.potential);
  const BcMatrix a = make_bc(cfg.bc);
  const DetEvaluator ev(q, a, det_options(cfg));
  const SpectrumReport rep = locate_spectrum(ev, clipped(cfg.region), cfg.max_refine);
  json j = root_block(cfg, q, a, rep);
  j["spectrum"] = to_json(rep);
  emit_text(cfg, out, dump_deterministic(j));
  return kExitOk;
}

int cmd_degenerate(const RunConfig& cfg, std::ostream& out) {
  const Potential q = make_potential(cfg.potential);
  auto d = degenerate_d(cfg, make_bc(cfg.bc));
  if (!d) {
    fail(ErrorCode::InvalidInput, "boundary conditions are not degenerate; pass --d");
  }
  const DegenerateClassification cls = classify_degenerate(q, *d);
  json j = to_json(cls);
  if (cls.kind == DegenerateCase::CountableDiscrete && *d != cplx{}) {
    const DetEvaluator ev = DetEvaluator::degenerate_visual(q, *d, det_options(cfg));
    j["spectrum"] = to_json(locate_spectrum(ev, clipped(cfg.region), cfg.max_refine));
  }
  emit_text(cfg, out, dump_deterministic(j));
  return kExitOk;
}

int cmd_example(const RunConfig& cfg, std::ostream& out) {
  const ProductKind kind = cfg.kind == 2 ? ProductKind::Example2 : ProductKind::Example1;
  const int drop =
      cfg.drop_prefix >= 0 ? cfg.drop_prefix : estimate_drop_prefix(kind, cfg.k_max);
  const ProductSpec spec = make_product_spec(kind, cfg.k_max, drop, true);
  const double limit = 0.5 * static_cast<double>(spec.a.back());
  const std::string emit = cfg.emit.empty() ? "report" : cfg.emit;
  if (emit == "zeros") {
    std::string text = "re,im,mult\n0,0,1\n";
    for (const auto& z : spec.zeros) {
      text += csv_number(z.location.real()) + "," + csv_number(z.location.imag()) + "," +
              std::to_string(z.multiplicity) + "\n";
    }
    emit_text(cfg, out, text);
    return kExitOk;
  }
  if (emit == "curve") {
    const double xmax = std::min(128.0, 0.99 * limit);
    std::string text = "x,re_f,im_f,tail_bound\n";
    std::vector<ProductValue> vals(2001);
    parallel_for(vals.size(), [&](std::size_t i) {
      vals[i] = product_eval(spec, xmax * static_cast<double>(i) / 2000.0);
    });
    for (std::size_t i = 0; i < vals.size(); ++i) {
      text += csv_number(xmax * static_cast<double>(i) / 2000.0) + "," +
              csv_number(vals[i].value.real()) + "," + csv_number(vals[i].value.imag()) + "," +
              csv_number(vals[i].tail_bound) + "\n";
    }
    emit_text(cfg, out, text);
    return kExitOk;
  }
  json j = to_json(nonclassical_spectrum_report(spec));
  const double R = std::min(128.0, 0.99 * limit);
  const double strip = std::min(20.0, 0.99 * limit);
  const PwEvidence pw = pw_membership_check(spec, R, strip);
  j["paley_wiener"] = {{"odd_defect", pw.odd_defect},
                       {"l2_tail_trend", pw.l2_tail_trend},
                       {"type_estimate", pw.type_estimate},
                       {"R", R},
                       {"half_strip", strip}};
  j["kind"] = cfg.kind;
  j["k_max"] = cfg.k_max;
  j["drop_prefix"] = drop;
  emit_text(cfg, out, dump_deterministic(j));
  return kExitOk;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const Potential q = make_potential(cfg.potential);
  const BcMatrix a = make_bc(cfg.bc);
  json j;
  const BcClass cls = classify(a);
  j["classification"] = to_json(cls);
  if (auto d = degenerate_d(cfg, a)) j["degenerate"] = to_json(classify_degenerate(q, *d));
  const DetEvaluator ev(q, a, det_options(cfg));
  const SpectrumReport rep = locate_spectrum(ev, clipped(cfg.region), cfg.max_refine);
  j["spectrum"] = to_json(rep);
  if (rep.classification == SpectrumClass::CountableDiscrete && !rep.records.empty()) {
    j["root_functions"] = root_block(cfg, q, a, rep);
  }
  j["input"] = {{"potential", cfg.potential},
                {"bc", cfg.bc},
                {"tol", cfg.tol},
                {"region", json::array({cfg.region.re0, cfg.region.re1, cfg.region.im0,
                                        cfg.region.im1})},
                {"max_refine", cfg.max_refine},
                {"N", cfg.n}};
  emit_text(cfg, out, dump_deterministic(j));
  return kExitOk;
}

int print_error(std::ostream& out, const std::string& code, const std::string& message,
                const json& extra = nullptr) {
  json e = {{"code", code}, {"message", message}};
  if (!extra.is_null()) e["diagnostics"] = extra;
  out << dump_deterministic({{"error", e}});
  return code.rfind("CFG", 0) == 0 || code == to_string(ErrorCode::InvalidInput)
             ? kExitValidation
             : kExitNumerical;
}

}  // namespace

cplx parse_complex(const std::string& token) {
  std::string t = trim(token);
  if (t.empty()) fail(ErrorCode::InvalidInput, "empty complex number");
  if (t.back() != 'i') return {parse_double(t), 0.0};
  t.pop_back();
  // split before the last sign that does not belong to an exponent
  std::size_t cut = std::string::npos;
  for (std::size_t i = t.size(); i-- > 1;) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      cut = i;
      break;
    }
  }
  auto imag_part = [](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    return parse_double(s);
  };
  if (cut == std::string::npos) return {0.0, imag_part(t)};
  return {parse_double(t.substr(0, cut)), imag_part(t.substr(cut))};
}

Rect parse_region(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) fail(ErrorCode::InvalidInput, "region needs re0,re1,im0,im1");
  return {parse_double(trim(parts[0])), parse_double(trim(parts[1])),
          parse_double(trim(parts[2])), parse_double(trim(parts[3]))};
}

Potential make_potential(const std::string& spec) {
  if (spec == "zero") return Potential::zero();
  if (is_keyword(spec, {"const"})) return Potential::constant(parse_complex(payload(spec)));
  if (is_keyword(spec, {"poly"})) {
    std::vector<cplx> c;
    for (const auto& t : split(payload(spec), ',')) c.push_back(parse_complex(t));
    if (c.empty()) fail(ErrorCode::InvalidInput, "poly needs coefficients");
    return Potential::polynomial(c);
  }
  return load_potential(spec);
}

BcMatrix make_bc(const std::string& spec) {
  if (spec == "dirichlet") return BcMatrix::dirichlet();
  if (spec == "neumann") return BcMatrix::neumann();
  if (spec == "periodic") return BcMatrix::periodic();
  if (spec == "antiperiodic") return BcMatrix::antiperiodic();
  if (is_keyword(spec, {"degenerate"})) return BcMatrix::degenerate(parse_complex(payload(spec)));
  if (is_keyword(spec, {"rows"})) {
    const auto rows = split(payload(spec), ';');
    if (rows.size() != 2) fail(ErrorCode::InvalidInput, "rows needs two ';'-separated rows");
    std::array<BcMatrix::Row, 2> r;
    for (std::size_t i = 0; i < 2; ++i) {
      const auto cells = split(rows[i], ',');
      if (cells.size() != 4) fail(ErrorCode::InvalidInput, "each row needs four entries");
      for (std::size_t k = 0; k < 4; ++k) r[i][k] = parse_complex(cells[k]);
    }
    return BcMatrix(r[0], r[1]);
  }
  return load_bc(spec);
}

void apply_config(const json& doc, RunConfig& cfg) {
  if (!doc.is_object()) fail(ErrorCode::InvalidInput, "config must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    try {
      if (key == "command") cfg.command = v.get<std::string>();
      else if (key == "potential") cfg.potential = v.get<std::string>();
      else if (key == "bc") cfg.bc = v.get<std::string>();
      else if (key == "d") cfg.d = v.is_string() ? v.get<std::string>() : v.dump();
      else if (key == "tol") cfg.tol = v.get<double>();
      else if (key == "region") {
        cfg.region = v.is_string() ? parse_region(v.get<std::string>())
                                   : Rect{v.at(0).get<double>(), v.at(1).get<double>(),
                                          v.at(2).get<double>(), v.at(3).get<double>()};
      }
      else if (key == "max_refine") cfg.max_refine = v.get<int>();
      else if (key == "k_max") cfg.k_max = v.get<int>();
      else if (key == "drop_prefix") cfg.drop_prefix = v.get<int>();
      else if (key == "kind") cfg.kind = v.get<int>();
      else if (key == "N") cfg.n = v.get<int>();
      else if (key == "grid") {
        cfg.grid_re = v.at(0).get<int>();
        cfg.grid_im = v.at(1).get<int>();
      }
      else if (key == "force_integration") cfg.force_integration = v.get<bool>();
      else if (key == "emit") cfg.emit = v.get<std::string>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "trace_dir") cfg.trace_dir = v.get<std::string>();
      else fail(ErrorCode::InvalidInput, "unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      fail(ErrorCode::InvalidInput, "config key '" + key + "': " + e.what());
    }
  }
}

std::vector<Diagnostic> validate(const RunConfig& cfg) {
  std::vector<Diagnostic> d;
  auto error = [&](const char* code, std::string msg) { d.push_back({code, "error", std::move(msg)}); };
  if (!kCommands.count(cfg.command)) error("CFG004", "unknown command '" + cfg.command + "'");

  auto check_source = [&](const std::string& spec, bool is_inline, const char* what,
                          auto&& build) {
    if (!is_inline && !std::filesystem::exists(spec)) {
      error("CFG001", std::string(what) + " file not found: " + spec);
      return;
    }
    try {
      build(spec);
    } catch (const Error& e) {
      error("CFG004", std::string(what) + ": " + e.what());
    }
  };
  check_source(cfg.potential, potential_inline(cfg.potential), "potential",
               [](const std::string& s) { (void)make_potential(s); });
  check_source(cfg.bc, bc_inline(cfg.bc), "boundary matrix",
               [](const std::string& s) { (void)make_bc(s); });
  if (!cfg.d.empty()) {
    try {
      (void)parse_complex(cfg.d);
    } catch (const Error& e) {
      error("CFG004", std::string("d: ") + e.what());
    }
  }

  if (!(cfg.tol >= 1e-13 && cfg.tol <= 1e-4)) {
    error("CFG002", "tol must lie in [1e-13, 1e-4], got " + csv_number(cfg.tol));
  }
  const Rect& r = cfg.region;
  if (!(r.re1 > r.re0) || !(r.im1 > r.im0)) {
    error("CFG003", "region must satisfy re0 < re1 and im0 < im1");
  } else if (r.re0 < 0.0) {
    d.push_back({"CFG003", "warning", "region re0 < 0 clipped to the half-plane Re mu >= 0"});
    if (!(r.re1 > 0.0)) error("CFG003", "region lies entirely in Re mu < 0");
  }
  if (cfg.max_refine < 1) error("CFG004", "max_refine must be positive");
  if (cfg.n < 1) error("CFG004", "N must be positive");
  if (cfg.grid_re < 1 || cfg.grid_im < 1) error("CFG004", "grid sizes must be positive");
  if (cfg.command == "example") {
    if (cfg.kind != 1 && cfg.kind != 2) error("CFG004", "kind must be 1 or 2");
    if (cfg.k_max < 16) error("CFG004", "k_max must be at least 16");
    if (cfg.drop_prefix >= cfg.k_max) error("CFG004", "drop_prefix must be below k_max");
    if (!cfg.emit.empty() && cfg.emit != "zeros" && cfg.emit != "curve" && cfg.emit != "report") {
      error("CFG004", "emit must be zeros, curve or report");
    }
  } else if (!cfg.emit.empty() && cfg.emit != "json" && cfg.emit != "csv") {
    error("CFG004", "emit must be json or csv");
  }
  return d;
}

json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
  json arr = json::array();
  for (const auto& x : diags) {
    arr.push_back({{"code", x.code}, {"severity", x.severity}, {"message", x.message}});
  }
  return arr;
}

int run(const RunConfig& cfg, std::ostream& out) {
  const std::vector<Diagnostic> diags = validate(cfg);
  const auto first_error = std::find_if(diags.begin(), diags.end(),
                                        [](const Diagnostic& x) { return x.severity == "error"; });
  if (cfg.command == "validate") {
    emit_text(cfg, out, dump_deterministic({{"diagnostics", diagnostics_to_json(diags)}}));
    return first_error == diags.end() ? kExitOk : kExitValidation;
  }
  if (first_error != diags.end()) {
    return print_error(out, first_error->code, first_error->message, diagnostics_to_json(diags));
  }
  try {
    if (cfg.command == "classify") return cmd_classify(cfg, out);
    if (cfg.command == "det-curve") return cmd_det_curve(cfg, out);
    if (cfg.command == "spectrum") return cmd_spectrum(cfg, out);
    if (cfg.command == "rootfns") return cmd_rootfns(cfg, out);
    if (cfg.command == "degenerate") return cmd_degenerate(cfg, out);
    if (cfg.command == "example") return cmd_example(cfg, out);
    return cmd_report(cfg, out);
  } catch (const Error& e) {
    return print_error(out, to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return print_error(out, to_string(ErrorCode::NumericalFailure), e.what());
  }
}

}  // namespace slspec::cli
