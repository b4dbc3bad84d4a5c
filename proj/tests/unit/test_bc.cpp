#include <gtest/gtest.h>

#include <random>

#include "slspec/bc.hpp"

using namespace slspec;

namespace {

// Oracle: 2x2 determinant of columns i, j (1-based) straight from the rows.
cplx minor_of(const BcMatrix& a, int i, int j) {
  return a(0, i - 1) * a(1, j - 1) - a(0, j - 1) * a(1, i - 1);
}

cplx random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return {n(rng), n(rng)};
}

BcMatrix random_row_op(const BcMatrix& a, std::mt19937_64& rng) {
  for (;;) {
    std::array<std::array<cplx, 2>, 2> m{};
    for (auto& r : m) {
      for (auto& v : r) v = random_complex(rng);
    }
    const cplx det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if (std::abs(det) > 0.1) return a.left_multiply(m);
  }
}

}  // namespace

TEST(Minors, HandComputedFixtures) {
  const Minors d = BcMatrix::dirichlet().minors();
  EXPECT_EQ(d.a34, cplx(1.0));
  EXPECT_EQ(d.a12, cplx(0.0));
  EXPECT_EQ(d.a13, cplx(0.0));

  const Minors n = BcMatrix::neumann().minors();
  EXPECT_EQ(n.a12, cplx(1.0));
  EXPECT_EQ(n.a34, cplx(0.0));

  const Minors p = BcMatrix::periodic().minors();
  EXPECT_EQ(p.a13, cplx(1.0));
  EXPECT_EQ(p.a14, cplx(-1.0));
  EXPECT_EQ(p.a23, cplx(-1.0));
  EXPECT_EQ(p.a24, cplx(1.0));
  EXPECT_EQ(p.a12, cplx(0.0));
  EXPECT_EQ(p.a34, cplx(0.0));
}

TEST(Minors, MatchColumnDeterminantsAndPlucker) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    BcMatrix::Row r0, r1;
    for (auto& v : r0) v = random_complex(rng);
    for (auto& v : r1) v = random_complex(rng);
    const BcMatrix a(r0, r1);
    const Minors m = a.minors();
    EXPECT_LT(std::abs(m.a12 - minor_of(a, 1, 2)), 1e-14);
    EXPECT_LT(std::abs(m.a24 - minor_of(a, 2, 4)), 1e-14);
    EXPECT_LT(m.plucker_residual(), 1e-12);
  }
}

TEST(Minors, DependentRowsRejected) {
  EXPECT_THROW(BcMatrix({1, 2, 3, 4}, {2, 4, 6, 8}), Error);
}

TEST(Classify, FixtureKinds) {
  EXPECT_TRUE(std::holds_alternative<StrengthenedRegular>(classify(BcMatrix::dirichlet()).kind));
  EXPECT_EQ(std::get<StrengthenedRegular>(classify(BcMatrix::dirichlet()).kind).group, 3);
  EXPECT_TRUE(std::holds_alternative<StrengthenedRegular>(classify(BcMatrix::neumann()).kind));

  const auto per = std::get<RegularNotStrengthened>(classify(BcMatrix::periodic()).kind);
  EXPECT_EQ(per.theta, 0);
  EXPECT_EQ(per.subtype, RegularSubtype::I);

  const auto anti = std::get<RegularNotStrengthened>(classify(BcMatrix::antiperiodic()).kind);
  EXPECT_EQ(anti.theta, 1);
  EXPECT_EQ(anti.subtype, RegularSubtype::I);

  const BcClass irr = classify(BcMatrix({0, 1, 2.5, 0}, {0, 0, 0, 1}));
  EXPECT_EQ(std::get<Irregular>(irr.kind).variant, 3);
  EXPECT_NEAR(std::abs(*irr.params.a0 - 2.5), 0.0, 1e-14);

  const BcClass deg = classify(BcMatrix({1, 2, 0, 0}, {0, 0, 1, -2}));
  const auto dv = std::get<Degenerate>(deg.kind);
  EXPECT_EQ(dv.variant, DegenerateVariant::VisualForm);
  EXPECT_LT(std::abs(dv.d - 2.0), 1e-14);

  const BcClass cauchy = classify(BcMatrix({1, 0, 0, 0}, {0, 0, 1, 0}));
  EXPECT_EQ(std::get<Degenerate>(cauchy.kind).variant, DegenerateVariant::CauchyLike);
}

TEST(Classify, TypeTwoAndThree) {
  const BcClass two = classify(BcMatrix({1, -1, 0, 5}, {0, 0, 1, -1}));
  const auto k = std::get<RegularNotStrengthened>(two.kind);
  EXPECT_EQ(k.subtype, RegularSubtype::II);
  EXPECT_EQ(k.theta, 0);
  EXPECT_LT(std::abs(*two.params.a14 - 5.0), 1e-13);
  EXPECT_TRUE(row_equivalent(two.canonical, BcMatrix({1, -1, 0, 5}, {0, 0, 1, -1})));

  const auto three = std::get<RegularNotStrengthened>(classify(BcMatrix({1, 2, 0, 0}, {0, 0, 1, -1})).kind);
  EXPECT_EQ(three.subtype, RegularSubtype::III);
}

TEST(Classify, CanonicalFormsAreRowEquivalent) {
  const BcMatrix scaled({2, 2 * 3.0, 0, 0}, {0, 0, 3, -3 * 3.0});
  const BcMatrix c = canonical_form(scaled);
  EXPECT_TRUE(row_equivalent(c, BcMatrix::degenerate(3.0)));
  EXPECT_LT(std::abs(c(0, 0) - 1.0), 1e-14);

  const BcMatrix anti = canonical_form(BcMatrix({3, 3, 0, 0}, {0, 0, -1, -1}));
  EXPECT_TRUE(row_equivalent(anti, BcMatrix::antiperiodic()));
}

TEST(Classify, InvariantUnderRowOperations) {
  std::mt19937_64 rng(11);
  const std::vector<BcMatrix> fixtures = {
      BcMatrix::dirichlet(), BcMatrix::neumann(), BcMatrix::periodic(),
      BcMatrix::antiperiodic(), BcMatrix({1, -1, 0, 1}, {0, 0, 1, -1}),
      BcMatrix({0, 1, 1, 0}, {0, 0, 0, 1}), BcMatrix::degenerate(1.0), BcMatrix::degenerate(2.0)};
  for (const auto& a : fixtures) {
    const std::string base = kind_name(classify(a).kind);
    for (int t = 0; t < 100; ++t) {
      const BcMatrix b = random_row_op(a, rng);
      EXPECT_EQ(kind_name(classify(b).kind), base);
      EXPECT_TRUE(row_equivalent(classify(b).canonical, classify(a).canonical));
    }
  }
}

TEST(Classify, RejectsNonPositiveTolerance) {
  try {
    classify(BcMatrix::dirichlet(), 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}
