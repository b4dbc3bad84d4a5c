#include <gtest/gtest.h>

#include <random>

#include "slspec/chardet.hpp"

using namespace slspec;

namespace {

// Oracle: Delta = det [[B_1(c), B_1(s)], [B_2(c), B_2(s)]] built from the
// forms directly, independent of the minor expansion.
cplx column_det(const BcMatrix& a, const FundamentalValues& f) {
  const cplx b1c = a.apply(0, 0.0, f.cp, 1.0, f.c);
  const cplx b1s = a.apply(0, 1.0, f.sp, 0.0, f.s);
  const cplx b2c = a.apply(1, 0.0, f.cp, 1.0, f.c);
  const cplx b2s = a.apply(1, 1.0, f.sp, 0.0, f.s);
  return b1c * b2s - b1s * b2c;
}

}  // namespace

TEST(CharDet, MatchesColumnDeterminant) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Potential q = Potential::polynomial({0.3, cplx{0.0, 0.5}, -0.2});
  for (int trial = 0; trial < 20; ++trial) {
    BcMatrix::Row r1, r2;
    for (auto& v : r1) v = {u(rng), u(rng)};
    for (auto& v : r2) v = {u(rng), u(rng)};
    const BcMatrix a(r1, r2);
    const DetEvaluator ev(q, a);
    const cplx mu{3.0 * u(rng) + 3.0, u(rng)};
    const FundamentalValues f = fundamental_at_pi(q, mu);
    const cplx ref = column_det(a, f);
    EXPECT_LT(std::abs(ev.delta(mu) - ref), 1e-9 * (1.0 + std::abs(ref)));
  }
}

TEST(CharDet, DirichletIsSinc) {
  const DetEvaluator ev(Potential::zero(), BcMatrix::dirichlet());
  for (cplx mu : {cplx{0.5}, cplx{2.2, 0.7}, cplx{7.0, -1.0}}) {
    const cplx ref = std::sin(kPi * mu) / mu;
    EXPECT_LT(std::abs(std::abs(ev.delta(mu)) - std::abs(ref)), 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST(CharDet, ForcedIntegrationAgreesWithClosedForm) {
  DetOptions forced;
  forced.force_integration = true;
  for (const BcMatrix& a : {BcMatrix::dirichlet(), BcMatrix::periodic(), BcMatrix({1, -1, 0, 1}, {0, 0, 1, -1})}) {
    const DetEvaluator fast(Potential::zero(), a), slow(Potential::zero(), a, forced);
    for (cplx mu : {cplx{0.7, 0.1}, cplx{11.5, 3.0}, cplx{19.2, -4.5}}) {
      const cplx ref = delta0(a, mu);
      EXPECT_LT(std::abs(fast.delta(mu) - ref), 1e-12 * (1.0 + std::abs(ref)));
      EXPECT_LT(std::abs(slow.delta(mu) - ref), 1e-9 * (1.0 + std::abs(ref)));
    }
  }
}

TEST(CharDet, DegenerateVisualForm) {
  const cplx d{2.0, 0.5};
  const DetEvaluator vis = DetEvaluator::degenerate_visual(Potential::polynomial({0.0, 1.0}), d);
  const DetEvaluator raw(Potential::polynomial({0.0, 1.0}), BcMatrix::degenerate(d));
  for (cplx mu : {cplx{1.5, 0.2}, cplx{4.0, -0.5}}) {
    const FundamentalValues f = fundamental_at_pi(Potential::polynomial({0.0, 1.0}), mu);
    const cplx ref = (d * d - 1.0) / d + f.c - f.sp;
    EXPECT_LT(std::abs(vis.delta(mu) - ref), 1e-9 * (1.0 + std::abs(ref)));
    EXPECT_LT(std::abs(std::abs(raw.delta(mu)) - std::abs(d * ref)), 1e-9 * (1.0 + std::abs(d * ref)));
  }
  // Symmetric q: c(pi) = s'(pi), so the visual form is the constant.
  const DetEvaluator sym = DetEvaluator::degenerate_visual(Potential::zero(), 3.0);
  EXPECT_LT(std::abs(sym.delta(cplx{2.3, 0.4}) - 8.0 / 3.0), 1e-12);
}

TEST(CharDet, LambdaDerivativeByFiniteDifference) {
  const DetEvaluator ev(Potential::polynomial({0.0, 1.0}), BcMatrix({1, 2, 0, 0}, {0, 0, 1, -1}));
  const cplx lam{5.0, 0.3};
  const double h = 1e-4;
  const cplx fd = (ev.delta(std::sqrt(lam + h)) - ev.delta(std::sqrt(lam - h))) / (2.0 * h);
  EXPECT_LT(std::abs(ev.lambda_derivative(std::sqrt(lam), 1) - fd), 1e-6 * (1.0 + std::abs(fd)));
}

TEST(CharDet, CacheSharedAcrossSignOfMu) {
  const DetEvaluator ev(Potential::polynomial({0.0, 1.0}), BcMatrix::dirichlet());
  const cplx mu{2.5, 0.5};
  const cplx a = ev.delta(mu);
  const std::size_t n = ev.evaluations();
  EXPECT_EQ(ev.delta(-mu), a);
  EXPECT_EQ(ev.evaluations(), n);
  const DetEvaluator copy = ev;
  copy.delta(mu);
  EXPECT_EQ(ev.evaluations(), n);
  ev.clear_cache();
  ev.delta(mu);
  EXPECT_GT(ev.evaluations(), n);
}

TEST(CharDet, SymmetricPotentialKeepsVisualFormConstant) {
  DetOptions forced;
  forced.force_integration = true;
  const DetEvaluator zero = DetEvaluator::degenerate_visual(Potential::zero(), 1.0, forced);
  const Potential c2 = Potential::polynomial({0.0, -1.0, 1.0 / kPi});  // x(x - pi)/pi
  const DetEvaluator sym = DetEvaluator::degenerate_visual(c2, 2.0);
  for (cplx mu : {cplx{3.3, 4.9}, cplx{-17.0, -5.0}, cplx{0.4, 0.0}}) {
    EXPECT_EQ(zero.delta(mu), cplx{});
    // rounding of q(pi - x) against q(x) leaves cancellation error in terms of size e^{pi |Im mu|}
    EXPECT_LT(std::abs(sym.delta(mu) - 1.5), 1e-12 + 1e-14 * std::exp(kPi * std::abs(mu.imag())));
  }
}
