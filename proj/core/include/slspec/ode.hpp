#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "slspec/common.hpp"
#include "slspec/potential.hpp"

namespace slspec {

struct OdeOptions {
  double tol = 1e-12;       // relative and absolute step tolerance
  double mu_cap = 500.0;    // largest admissible |mu|
  std::size_t max_steps = 2'000'000;
};

/// c, c', s, s' at x = pi for one mu, with lambda-derivatives.
struct FundamentalValues {
  cplx mu;
  cplx c, cp, s, sp;
  /// dlambda[j - 1] = d^j/dlambda^j of (c, c', s, s') at pi.
  std::vector<std::array<cplx, 4>> dlambda;

  cplx wronskian() const { return c * sp - cp * s; }
  /// Order-j quadruple, j = 0 giving the values themselves.
  std::array<cplx, 4> order(int j) const;
};

/// Sampled solution u, u' of u'' - q u + lambda u = g on a grid.
struct SolutionTrace {
  cplx lambda;
  std::vector<double> x;
  std::vector<cplx> u;
  std::vector<cplx> up;

  std::size_t size() const { return x.size(); }
};

/// n equally spaced nodes from 0 to pi inclusive.
std::vector<double> uniform_grid(std::size_t n = 1025);

/// sin(pi mu) / mu, equal to pi at mu = 0.
cplx sinc_pi(cplx mu);

/// Closed-form fundamental system of u'' + mu^2 u = 0 at pi.
FundamentalValues free_fundamental(cplx mu);

/// Integrates both fundamental columns (and m lambda-derivatives) to pi.
FundamentalValues fundamental_at_pi(const Potential& q, cplx mu, int m = 0,
                                    const OdeOptions& opt = {});

SolutionTrace solve_ivp(const Potential& q, cplx lambda, cplx u0, cplx up0,
                        std::span<const double> grid,
                        const OdeOptions& opt = {});

/// Solves u'' - q u + lambda u = rhs.u on the grid of rhs; the forcing is
/// interpolated by cubic Hermite segments built from (rhs.u, rhs.up).
SolutionTrace solve_inhomogeneous(const Potential& q, cplx lambda,
                                  const SolutionTrace& rhs, cplx u0, cplx up0,
                                  const OdeOptions& opt = {});

/// Traces of d^j c / dlambda^j and d^j s / dlambda^j for j = 0..m.
struct FundamentalTraces {
  std::vector<SolutionTrace> c;
  std::vector<SolutionTrace> s;
};

FundamentalTraces fundamental_traces(const Potential& q, cplx mu, int m,
                                     std::span<const double> grid,
                                     const OdeOptions& opt = {});

/// Max-norm residual |u'' - (q - lambda) u - g| on the trace grid, with u''
/// obtained by differentiating the sampled u' (sixth-order central
/// differences on uniform grids). Endpoint stencils are skipped.
double ode_residual(const Potential& q, const SolutionTrace& u,
                    const SolutionTrace* rhs = nullptr);

/// Columns x, re u, im u, re u', im u' with 12 significant digits.
void write_trace_csv(std::ostream& os, const SolutionTrace& t);

}  // namespace slspec
