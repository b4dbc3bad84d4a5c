#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "slspec/root_functions.hpp"

using namespace slspec;

namespace {

SpectrumReport scan(const Potential& q, const BcMatrix& a, const Rect& region) {
  return locate_spectrum(DetEvaluator(q, a), region);
}

using Vec4 = std::array<cplx, 4>;

// Null space of the 2x4 form matrix by Cramer's rule on the best pivot pair.
std::array<Vec4, 2> null_space(const BcMatrix& b) {
  int pi = 0, pj = 1;
  double best = -1.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const double d = std::abs(b(0, i) * b(1, j) - b(0, j) * b(1, i));
      if (d > best) best = d, pi = i, pj = j;
    }
  const cplx det = b(0, pi) * b(1, pj) - b(0, pj) * b(1, pi);
  std::array<Vec4, 2> out{};
  int slot = 0;
  for (int f = 0; f < 4; ++f) {
    if (f == pi || f == pj) continue;
    Vec4 x{};
    x[f] = 1.0;
    const cplx r0 = -b(0, f), r1 = -b(1, f);
    x[pi] = (r0 * b(1, pj) - b(0, pj) * r1) / det;
    x[pj] = (b(0, pi) * r1 - r0 * b(1, pi)) / det;
    out[slot++] = x;
  }
  return out;
}

// Green's identity: for boundary data u admissible for A and v for A*,
// u'(pi)conj(v(pi)) - u(pi)conj(v'(pi)) - u'(0)conj(v(0)) + u(0)conj(v'(0)) = 0.
// Entries are ordered (f'(0), f'(pi), f(0), f(pi)).
double green_defect(const BcMatrix& a, const BcMatrix& astar) {
  double worst = 0.0;
  for (const auto& u : null_space(a)) {
    for (const auto& v : null_space(astar)) {
      const cplx g = u[1] * std::conj(v[3]) - u[3] * std::conj(v[1]) - u[0] * std::conj(v[2]) +
                     u[2] * std::conj(v[0]);
      worst = std::max(worst, std::abs(g));
    }
  }
  return worst;
}

}  // namespace

TEST(RootFunctions, InnerProductOfSines) {
  const auto grid = uniform_grid(1025);
  const SolutionTrace s1 = solve_ivp(Potential::zero(), 1.0, 0.0, 1.0, grid);
  const SolutionTrace s2 = solve_ivp(Potential::zero(), 4.0, 0.0, 2.0, grid);
  EXPECT_NEAR(l2_norm(s1), std::sqrt(kPi / 2.0), 1e-10);
  EXPECT_LT(std::abs(inner_product(s1, s2)), 1e-10);
}

TEST(RootFunctions, DirichletEigenfunctionsAreSines) {
  const SpectrumReport r = scan(Potential::zero(), BcMatrix::dirichlet(), {0.0, 10.5, -1.0, 1.0});
  ASSERT_EQ(r.records.size(), 10u);
  for (const auto& rec : r.records) {
    const Eigenfunctions e = eigenfunction(Potential::zero(), BcMatrix::dirichlet(), rec);
    ASSERT_EQ(e.traces.size(), 1u);
    const auto& t = e.traces.front();
    const double n = std::round(rec.mu.real());
    double err = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      err = std::max(err, std::abs(t.u[i] - std::sqrt(2.0 / kPi) * std::sin(n * t.x[i])));
    }
    EXPECT_LT(err, 1e-6) << "n = " << n;
  }
}

TEST(RootFunctions, PeriodicHasTwoEigenfunctions) {
  const SpectrumReport r = scan(Potential::zero(), BcMatrix::periodic(), {0.0, 6.5, -1.0, 1.0});
  for (const auto& rec : r.records) {
    const Eigenfunctions e = eigenfunction(Potential::zero(), BcMatrix::periodic(), rec);
    EXPECT_EQ(e.geometric_two, rec.multiplicity == 2);
    if (e.traces.size() == 2) {
      EXPECT_LT(std::abs(inner_product(e.traces[0], e.traces[1])), 1e-9);
    }
    const auto chains = associated_chain(Potential::zero(), BcMatrix::periodic(), rec, 2);
    ASSERT_EQ(chains.size(), e.traces.size());
    for (const auto& ch : chains) EXPECT_EQ(ch.order(), 0);
  }
}

TEST(RootFunctions, TypeThreeChainSolvesForcedEquation) {
  const Potential q = Potential::zero();
  const BcMatrix a({1, 2, 0, 0}, {0, 0, 1, -1});
  const SpectrumReport r = scan(q, a, {0.5, 6.5, -1.0, 1.0});
  ASSERT_FALSE(r.records.empty());
  for (const auto& rec : r.records) {
    ASSERT_EQ(rec.multiplicity, 2);
    const auto chains = associated_chain(q, a, rec, 2);
    ASSERT_EQ(chains.size(), 1u);
    const RootChain& ch = chains.front();
    ASSERT_EQ(ch.order(), 1);
    // u1'' - q u1 + lambda u1 = u0
    EXPECT_LT(ode_residual(q, ch.chain[1], &ch.chain[0]), 1e-6);
    for (const auto& link : ch.chain) {
      const auto b = boundary_residual(a, link);
      EXPECT_LT(std::max(b[0], b[1]), 1e-7);
    }
    EXPECT_LT(ch.cross_check, 1e-6);
  }
}

TEST(RootFunctions, AdjointForms) {
  EXPECT_TRUE(row_equivalent(adjoint_bc(BcMatrix::dirichlet()), BcMatrix::dirichlet()));
  EXPECT_TRUE(row_equivalent(adjoint_bc(BcMatrix::periodic()), BcMatrix::periodic()));
  for (const BcMatrix& a : {BcMatrix({1, 2, 0, 0}, {0, 0, 1, -1}), BcMatrix({0, 1, 1, 0}, {0, 0, 0, 1}),
                            BcMatrix({1, cplx{0.5, 1.0}, 2, 0}, {0, 3, 1, cplx{-1, 0.2}})}) {
    EXPECT_LT(green_defect(a, adjoint_bc(a)), 1e-12);
  }
}

TEST(RootFunctions, BiorthogonalSystems) {
  struct Case {
    BcMatrix a;
    Potential q;
    Rect region;
  };
  const std::vector<Case> cases = {
      {BcMatrix::dirichlet(), Potential::zero(), {0.0, 10.5, -1.0, 1.0}},
      {BcMatrix::neumann(), Potential::zero(), {0.0, 9.5, -1.0, 1.0}},
      {BcMatrix({0, 1, 1, 0}, {0, 0, 0, 1}), Potential::zero(), {0.0, 20.0, 0.0, 2.5}},
      {BcMatrix({1, 2, 0, 0}, {0, 0, 1, -1}), Potential::polynomial({0.0, cplx{0.0, 0.3}}), {0.0, 10.5, -1.0, 1.0}},
  };
  for (const auto& c : cases) {
    const SpectrumReport r = scan(c.q, c.a, c.region);
    const auto chains = root_system(c.q, c.a, r);
    const BiorthogonalPair pair = dual_system(c.q, c.a, chains);
    EXPECT_GE(pair.u.size(), 10u);
    EXPECT_LT(pair.gram_residual, 1e-5);
    EXPECT_TRUE(pair.notes.empty());
    const BcMatrix astar = adjoint_bc(c.a);
    for (const auto& v : pair.v) {
      const auto b = boundary_residual(astar, v);
      EXPECT_LT(std::max(b[0], b[1]), 1e-6 * (1.0 + l2_norm(v)));
    }
  }
}

TEST(RootFunctions, DirichletDiagnostics) {
  const SpectrumReport r = scan(Potential::zero(), BcMatrix::dirichlet(), {0.0, 12.5, -1.0, 1.0});
  const BiorthogonalPair pair =
      dual_system(Potential::zero(), BcMatrix::dirichlet(), root_system(Potential::zero(), BcMatrix::dirichlet(), r));
  const BasisDiagnostics d = basis_diagnostics(pair, 12);
  EXPECT_LE(d.gram_cond, 1.0 + 1e-6);
  for (double p : d.norm_products) EXPECT_NEAR(p, 1.0, 1e-8);
  for (double k : d.kernel_sup) EXPECT_NEAR(k, 2.0 / kPi, 1e-3);
  EXPECT_THROW(basis_diagnostics(pair, 13), Error);
}
