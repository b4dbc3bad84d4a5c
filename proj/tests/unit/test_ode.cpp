#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include "slspec/ode.hpp"

using namespace slspec;

namespace {

// Independent oracle: classical RK4 with a fixed fine step for
// y = (c, c', s, s'), c'' = (q - lambda) c.
std::array<cplx, 4> rk4_fundamental(const std::function<cplx(double)>& q, cplx lambda,
                                    int steps = 20000) {
  std::array<cplx, 4> y{1.0, 0.0, 0.0, 1.0};
  const double h = kPi / steps;
  auto f = [&](double x, const std::array<cplx, 4>& v) {
    const cplx k = q(x) - lambda;
    return std::array<cplx, 4>{v[1], k * v[0], v[3], k * v[2]};
  };
  for (int i = 0; i < steps; ++i) {
    const double x = i * h;
    auto add = [](const std::array<cplx, 4>& a, const std::array<cplx, 4>& b, double s) {
      std::array<cplx, 4> r;
      for (int k = 0; k < 4; ++k) r[k] = a[k] + s * b[k];
      return r;
    };
    const auto k1 = f(x, y);
    const auto k2 = f(x + h / 2, add(y, k1, h / 2));
    const auto k3 = f(x + h / 2, add(y, k2, h / 2));
    const auto k4 = f(x + h, add(y, k3, h));
    for (int k = 0; k < 4; ++k) y[k] += h / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
  }
  return y;
}

double rel(cplx a, cplx b, double scale) { return std::abs(a - b) / std::max(1.0, scale); }

}  // namespace

TEST(Ode, FreeClosedForm) {
  for (cplx mu : {cplx{0.0, 0.0}, cplx{1.3, 0.2}, cplx{7.5, -2.0}, cplx{19.5, 4.9}}) {
    const FundamentalValues f = free_fundamental(mu);
    const cplx c = std::cos(kPi * mu);
    const cplx s = mu == cplx{} ? cplx{kPi} : std::sin(kPi * mu) / mu;
    EXPECT_LT(rel(f.c, c, std::abs(c)), 1e-14);
    EXPECT_LT(rel(f.s, s, std::abs(s)), 1e-14);
    EXPECT_LT(std::abs(f.wronskian() - 1.0), 1e-10 * (1.0 + std::abs(f.c * f.sp)));
  }
}

TEST(Ode, IntegratedZeroPotentialMatchesClosedForm) {
  const Potential q = Potential::sampled([](double) { return cplx{}; });
  for (cplx mu : {cplx{0.5, 0.0}, cplx{3.2, 1.1}, cplx{12.0, -3.0}, cplx{19.5, -4.9}}) {
    const FundamentalValues f = fundamental_at_pi(q, mu);
    const FundamentalValues g = free_fundamental(mu);
    const double scale = std::abs(g.c) + std::abs(g.sp) + std::abs(g.s) * std::abs(mu);
    EXPECT_LT(rel(f.c, g.c, scale), 1e-9);
    EXPECT_LT(rel(f.s, g.s, scale), 1e-9);
    EXPECT_LT(rel(f.cp, g.cp, scale * std::abs(mu)), 1e-9);
    EXPECT_LT(rel(f.sp, g.sp, scale), 1e-9);
  }
}

TEST(Ode, LinearPotentialAgainstRk4) {
  const Potential q = Potential::polynomial({0.0, 1.0});
  for (cplx mu : {cplx{1.0, 0.0}, cplx{2.5, 0.5}, cplx{4.0, -1.0}}) {
    const FundamentalValues f = fundamental_at_pi(q, mu);
    const auto y = rk4_fundamental([](double x) { return cplx{x}; }, mu * mu);
    EXPECT_LT(std::abs(f.c - y[0]), 1e-8 * (1.0 + std::abs(y[0])));
    EXPECT_LT(std::abs(f.cp - y[1]), 1e-8 * (1.0 + std::abs(y[1])));
    EXPECT_LT(std::abs(f.s - y[2]), 1e-8 * (1.0 + std::abs(y[2])));
    EXPECT_LT(std::abs(f.sp - y[3]), 1e-8 * (1.0 + std::abs(y[3])));
    EXPECT_LT(std::abs(f.wronskian() - 1.0), 1e-9);
  }
}

TEST(Ode, ConstantPotentialShiftsLambda) {
  const cplx q0{2.0, 0.5};
  const Potential q = Potential::sampled([&](double) { return q0; });
  const cplx mu{3.0, 0.4};
  const FundamentalValues f = fundamental_at_pi(q, mu);
  const FundamentalValues g = free_fundamental(std::sqrt(mu * mu - q0));
  EXPECT_LT(std::abs(f.c - g.c), 1e-9 * (1.0 + std::abs(g.c)));
  EXPECT_LT(std::abs(f.sp - g.sp), 1e-9 * (1.0 + std::abs(g.sp)));
}

TEST(Ode, LambdaDerivativesMatchFiniteDifferences) {
  const Potential q = Potential::polynomial({0.0, 1.0});
  const cplx mu{2.3, 0.3};
  const FundamentalValues f = fundamental_at_pi(q, mu, 2);
  const cplx lam = mu * mu;
  const double h = 1e-4;
  const auto plus = fundamental_at_pi(q, std::sqrt(lam + h));
  const auto minus = fundamental_at_pi(q, std::sqrt(lam - h));
  const std::array<cplx, 4> p = plus.order(0), m = minus.order(0), c = f.order(0);
  for (int k = 0; k < 4; ++k) {
    const cplx d1 = (p[k] - m[k]) / (2.0 * h);
    const cplx d2 = (p[k] - 2.0 * c[k] + m[k]) / (h * h);
    EXPECT_LT(std::abs(f.order(1)[k] - d1), 1e-6 * (1.0 + std::abs(d1)));
    EXPECT_LT(std::abs(f.order(2)[k] - d2), 1e-3 * (1.0 + std::abs(d2)));
  }
}

TEST(Ode, SolveIvpSine) {
  const auto grid = uniform_grid(257);
  const SolutionTrace t = solve_ivp(Potential::zero(), 4.0, 0.0, 2.0, grid);
  double err = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    err = std::max(err, std::abs(t.u[i] - std::sin(2.0 * t.x[i])));
    err = std::max(err, std::abs(t.up[i] - 2.0 * std::cos(2.0 * t.x[i])));
  }
  EXPECT_LT(err, 1e-10);
  EXPECT_LT(ode_residual(Potential::zero(), t), 1e-8);
}

TEST(Ode, InhomogeneousConstantForcing) {
  // u'' + u = 1, u(0) = u'(0) = 0  =>  u = 1 - cos x
  const auto grid = uniform_grid(513);
  SolutionTrace rhs;
  rhs.x = grid;
  rhs.u.assign(grid.size(), 1.0);
  rhs.up.assign(grid.size(), 0.0);
  const SolutionTrace u = solve_inhomogeneous(Potential::zero(), 1.0, rhs, 0.0, 0.0);
  double err = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) err = std::max(err, std::abs(u.u[i] - (1.0 - std::cos(u.x[i]))));
  EXPECT_LT(err, 1e-10);
  EXPECT_LT(ode_residual(Potential::zero(), u, &rhs), 1e-8);
}

TEST(Ode, RejectsOutOfRange) {
  try {
    fundamental_at_pi(Potential::zero(), cplx{0.0, 250.0});
    FAIL();
  } catch (const IntegrationError&) {
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
  OdeOptions bad;
  bad.tol = 0.0;
  EXPECT_THROW(fundamental_at_pi(Potential::zero(), 1.0, 0, bad), Error);
}

TEST(Ode, TraceCsvHasHeaderAndRows) {
  const SolutionTrace t = solve_ivp(Potential::zero(), 1.0, 0.0, 1.0, uniform_grid(17));
  std::ostringstream os;
  write_trace_csv(os, t);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("x,re_u,im_u,re_up,im_up\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 18);
}
