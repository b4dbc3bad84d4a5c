#pragma once

#include <array>
#include <string>
#include <vector>

#include "slspec/bc.hpp"
#include "slspec/ode.hpp"
#include "slspec/potential.hpp"
#include "slspec/spectrum.hpp"

namespace slspec {

struct RootOptions {
  std::size_t grid_points = 1025;  // uniform trace grid on [0, pi]
  OdeOptions ode;
  double rank_tol = 1e-7;          // relative singular-value cutoff
  double boundary_tol = 1e-6;      // relative boundary residual accepting a chain link
};

/// Integral of u conj(v) over [0, pi]; composite Simpson on uniform grids.
cplx inner_product(const SolutionTrace& u, const SolutionTrace& v);
double l2_norm(const SolutionTrace& u);

/// |B_1(u)|, |B_2(u)| from the end values of the trace.
std::array<double, 2> boundary_residual(const BcMatrix& a, const SolutionTrace& u);

struct Eigenfunctions {
  std::vector<SolutionTrace> traces;  // one, or two when every solution fits
  bool geometric_two = false;
};

/// Null space of [B_i(c), B_i(s)] at the record's lambda, normalized to
/// unit L2 norm with the first significant sample real and positive.
Eigenfunctions eigenfunction(const Potential& q, const BcMatrix& a,
                             const EigenvalueRecord& rec, const RootOptions& opt = {});

struct RootChain {
  EigenvalueRecord eigen;
  std::vector<SolutionTrace> chain;  // u^0, u^1, ..., u^p
  int branch = 0;                    // which eigenfunction when two exist
  double boundary_residual = 0.0;    // max |B_i| over the chain
  double ode_residual = 0.0;         // max residual of the defining equations
  double cross_check = 0.0;          // inhomogeneous-solve route, relative
  std::string note;

  int order() const { return static_cast<int>(chain.size()) - 1; }
};

/// Root functions at one eigenvalue: u^p = (-1)^p d^p/dlambda^p phi / p!
/// with phi = B_r(s) c - B_r(c) s, terminated at the first link that misses
/// the boundary conditions. Returns one chain per eigenfunction.
std::vector<RootChain> associated_chain(const Potential& q, const BcMatrix& a,
                                        const EigenvalueRecord& rec, int p_max,
                                        const RootOptions& opt = {});

/// Boundary matrix of the adjoint problem (coefficient conj(q)): the forms
/// annihilating u'conj(v) - u conj(v') at 0 and pi for every admissible u.
BcMatrix adjoint_bc(const BcMatrix& a);

struct RootLabel {
  std::size_t record = 0;
  int branch = 0;
  int order = 0;
  cplx mu;
};

struct BiorthogonalPair {
  std::vector<SolutionTrace> u;
  std::vector<SolutionTrace> v;
  std::vector<RootLabel> labels;
  double gram_residual = 0.0;  // max |<u_n, v_m> - delta_nm|
  std::vector<std::string> notes;
};

/// Dual system from adjoint root functions, paired inside each eigenvalue
/// by inverting the local Gram matrix.
BiorthogonalPair dual_system(const Potential& q, const BcMatrix& a,
                             const std::vector<RootChain>& chains,
                             const RootOptions& opt = {});

struct BasisDiagnostics {
  double gram_cond = 0.0;
  std::vector<double> norm_products;
  std::vector<double> kernel_sup;
};

BasisDiagnostics basis_diagnostics(const BiorthogonalPair& pair, std::size_t n);

/// Chains for every record of a report, in record order.
std::vector<RootChain> root_system(const Potential& q, const BcMatrix& a,
                                   const SpectrumReport& report,
                                   const RootOptions& opt = {});

}  // namespace slspec
