#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "slspec/bc.hpp"
#include "slspec/json_io.hpp"
#include "slspec/potential.hpp"

namespace slspec::cli {

struct RunConfig {
  std::string command;
  std::string potential = "zero";   // inline spec or file path
  std::string bc = "dirichlet";     // inline spec or file path
  std::string d;                    // degenerate parameter, complex token
  double tol = 1e-12;
  Rect region{0.0, 10.5, -1.0, 1.0};
  int max_refine = 40;
  int k_max = 64;
  int drop_prefix = -1;             // -1: estimate from the growth check
  int kind = 1;
  int n = 10;                       // sections for basis diagnostics
  int grid_re = 41;
  int grid_im = 21;
  bool force_integration = false;
  std::string emit;                 // json|csv, or zeros|curve|report
  std::string out;                  // empty: stdout
  std::string trace_dir;            // rootfns: per-link CSV traces
};

struct Diagnostic {
  std::string code;
  std::string severity;  // "error" or "warning"
  std::string message;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Parses "1.5", "-2i", "1e-3+0.5i".
cplx parse_complex(const std::string& token);
/// "re0,re1,im0,im1".
Rect parse_region(const std::string& text);

/// zero | const:c | poly:c0,c1,... | path (.json or .csv)
Potential make_potential(const std::string& spec);
/// dirichlet | neumann | periodic | antiperiodic | degenerate:d |
/// rows:a11,a12,a13,a14;a21,a22,a23,a24 | path (.json)
BcMatrix make_bc(const std::string& spec);

/// Applies the keys of a JSON config document on top of cfg.
void apply_config(const json& doc, RunConfig& cfg);

/// Never mutates state. Codes: CFG001 missing input file, CFG002 tolerance
/// out of range, CFG003 empty or clipped region, CFG004 bad option value.
std::vector<Diagnostic> validate(const RunConfig& cfg);
json diagnostics_to_json(const std::vector<Diagnostic>& diags);

/// Dispatches one command; results go to cfg.out (atomically) or `out`.
/// Returns the process exit status; failures print {"error": {...}}.
int run(const RunConfig& cfg, std::ostream& out);

}  // namespace slspec::cli
