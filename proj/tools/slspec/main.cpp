#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cli.hpp"

using slspec::cli::RunConfig;

int main(int argc, char** argv) {
  CLI::App app{"Spectral toolkit for u'' - q u + lambda u = 0 on [0, pi] with two-point boundary forms"};
  app.set_version_flag("--version", "slspec 0.1.0");

  RunConfig flags;
  std::string config_path, region, grid;
  app.add_option("command", flags.command,
                 "classify | det-curve | spectrum | rootfns | degenerate | example | report | validate")
      ->required();
  app.add_option("--config", config_path, "JSON config file; flags override its keys");
  auto* o_pot = app.add_option("--potential", flags.potential,
                               "zero | const:c | poly:c0,c1,... | file (.json/.csv)");
  auto* o_bc = app.add_option("--bc", flags.bc,
                              "dirichlet | neumann | periodic | antiperiodic | degenerate:d | "
                              "rows:a11,a12,a13,a14;a21,a22,a23,a24 | file (.json)");
  auto* o_d = app.add_option("--d", flags.d, "degenerate parameter, e.g. 3 or 1+0.5i");
  auto* o_tol = app.add_option("--tol", flags.tol, "integrator tolerance");
  auto* o_region = app.add_option("--region", region, "re0,re1,im0,im1 in the mu-plane");
  auto* o_refine = app.add_option("--max-refine", flags.max_refine, "bisection depth limit");
  auto* o_kmax = app.add_option("--kmax", flags.k_max, "product truncation index");
  auto* o_drop = app.add_option("--drop-prefix", flags.drop_prefix,
                                "leading factors removed from the product (default: estimated)");
  auto* o_kind = app.add_option("--kind", flags.kind, "example product, 1 or 2");
  auto* o_n = app.add_option("--N", flags.n, "number of root functions in basis diagnostics");
  auto* o_grid = app.add_option("--grid", grid, "det-curve samples nre,nim");
  auto* o_force = app.add_flag("--force-integration", flags.force_integration,
                               "integrate even when q is constant");
  auto* o_emit = app.add_option("--emit", flags.emit, "json | csv; example: zeros | curve | report");
  auto* o_out = app.add_option("--out", flags.out, "output file (written atomically)");
  auto* o_trace = app.add_option("--trace-dir", flags.trace_dir, "directory for rootfns CSV traces");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : slspec::cli::kExitValidation;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cout << slspec::dump_deterministic(
            {{"error", {{"code", "CFG001"}, {"message", "config file not found: " + config_path}}}});
        return slspec::cli::kExitValidation;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      slspec::cli::apply_config(slspec::json::parse(ss.str()), cfg);
    }
    cfg.command = flags.command;
    if (o_pot->count()) cfg.potential = flags.potential;
    if (o_bc->count()) cfg.bc = flags.bc;
    if (o_d->count()) cfg.d = flags.d;
    if (o_tol->count()) cfg.tol = flags.tol;
    if (o_region->count()) cfg.region = slspec::cli::parse_region(region);
    if (o_refine->count()) cfg.max_refine = flags.max_refine;
    if (o_kmax->count()) cfg.k_max = flags.k_max;
    if (o_drop->count()) cfg.drop_prefix = flags.drop_prefix;
    if (o_kind->count()) cfg.kind = flags.kind;
    if (o_n->count()) cfg.n = flags.n;
    if (o_grid->count()) {
      const auto comma = grid.find(',');
      if (comma == std::string::npos) throw slspec::Error(slspec::ErrorCode::InvalidInput, "grid needs nre,nim");
      cfg.grid_re = std::stoi(grid.substr(0, comma));
      cfg.grid_im = std::stoi(grid.substr(comma + 1));
    }
    if (o_force->count()) cfg.force_integration = flags.force_integration;
    if (o_emit->count()) cfg.emit = flags.emit;
    if (o_out->count()) cfg.out = flags.out;
    if (o_trace->count()) cfg.trace_dir = flags.trace_dir;
  } catch (const std::exception& e) {
    std::cout << slspec::dump_deterministic(
        {{"error", {{"code", "CFG004"}, {"message", e.what()}}}});
    return slspec::cli::kExitValidation;
  }
  return slspec::cli::run(cfg, std::cout);
}
