#include "slspec/bc.hpp"

#include <algorithm>
#include <cmath>

namespace slspec {

namespace {

cplx det2(cplx a, cplx b, cplx c, cplx d) { return a * d - b * c; }

double row_norm(const BcMatrix::Row& r) {
  double s = 0.0;
  for (const cplx& v : r) s += std::norm(v);
  return std::sqrt(s);
}

std::array<cplx, 6> as_array(const Minors& m) {
  return {m.a12, m.a13, m.a14, m.a23, m.a24, m.a34};
}

}  // namespace

double Minors::max_abs() const {
  double s = 0.0;
  for (const cplx& v : as_array(*this)) s = std::max(s, std::abs(v));
  return s;
}

double Minors::plucker_residual() const {
  const double s = max_abs();
  if (s == 0.0) return 0.0;
  return std::abs(a12 * a34 - a13 * a24 + a14 * a23) / (s * s);
}

Minors Minors::scaled(cplx f) const {
  return {f * a12, f * a13, f * a14, f * a23, f * a24, f * a34};
}

BcMatrix::BcMatrix(const Row& first, const Row& second, double tol)
    : rows_{first, second} {
  for (const Row& r : rows_) {
    for (const cplx& v : r) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        fail(ErrorCode::InvalidInput, "boundary matrix entries must be finite");
      }
    }
  }
  const double scale = row_norm(first) * row_norm(second);
  if (scale == 0.0 || minors_unchecked().max_abs() <= tol * scale) {
    fail(ErrorCode::DegenerateMatrix, "boundary forms are linearly dependent");
  }
}

Minors BcMatrix::minors_unchecked() const {
  const Row& p = rows_[0];
  const Row& r = rows_[1];
  return {det2(p[0], p[1], r[0], r[1]), det2(p[0], p[2], r[0], r[2]),
          det2(p[0], p[3], r[0], r[3]), det2(p[1], p[2], r[1], r[2]),
          det2(p[1], p[3], r[1], r[3]), det2(p[2], p[3], r[2], r[3])};
}

BcMatrix BcMatrix::dirichlet() { return {{0, 0, 1, 0}, {0, 0, 0, 1}}; }
BcMatrix BcMatrix::neumann() { return {{1, 0, 0, 0}, {0, 1, 0, 0}}; }
BcMatrix BcMatrix::periodic() { return {{1, -1, 0, 0}, {0, 0, 1, -1}}; }
BcMatrix BcMatrix::antiperiodic() { return {{1, 1, 0, 0}, {0, 0, 1, 1}}; }
BcMatrix BcMatrix::degenerate(cplx d) {
  return {{1.0, d, 0.0, 0.0}, {0.0, 0.0, 1.0, -d}};
}

Minors BcMatrix::minors() const { return minors_unchecked(); }

cplx BcMatrix::apply(int row, cplx up0, cplx uppi, cplx u0, cplx upi) const {
  const Row& r = rows_[row];
  return r[0] * up0 + r[1] * uppi + r[2] * u0 + r[3] * upi;
}

BcMatrix BcMatrix::left_multiply(
    const std::array<std::array<cplx, 2>, 2>& m) const {
  Row a{}, b{};
  for (int j = 0; j < 4; ++j) {
    a[j] = m[0][0] * rows_[0][j] + m[0][1] * rows_[1][j];
    b[j] = m[1][0] * rows_[0][j] + m[1][1] * rows_[1][j];
  }
  return {a, b, 0.0};
}

BcMatrix BcMatrix::row_normalized() const {
  Row a = rows_[0];
  Row b = rows_[1];
  const double na = row_norm(a);
  const double nb = row_norm(b);
  for (auto& v : a) v /= na;
  for (auto& v : b) v /= nb;
  return {a, b, 0.0};
}

BcMatrix BcMatrix::rref() const {
  std::array<Row, 2> m = rows_;
  const double scale = std::max(row_norm(m[0]), row_norm(m[1]));
  int pivot_row = 0;
  for (int col = 0; col < 4 && pivot_row < 2; ++col) {
    int best = pivot_row;
    for (int r = pivot_row; r < 2; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[best][col])) best = r;
    }
    if (std::abs(m[best][col]) <= 1e-14 * scale) continue;
    std::swap(m[pivot_row], m[best]);
    const cplx p = m[pivot_row][col];
    for (auto& v : m[pivot_row]) v /= p;
    m[pivot_row][col] = 1.0;
    for (int r = 0; r < 2; ++r) {
      if (r == pivot_row) continue;
      const cplx f = m[r][col];
      for (int j = 0; j < 4; ++j) m[r][j] -= f * m[pivot_row][j];
      m[r][col] = 0.0;
    }
    ++pivot_row;
  }
  return {m[0], m[1], 0.0};
}

Minors minors(const BcMatrix& a, double tol) {
  const Minors m = a.minors();
  double entry = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) entry = std::max(entry, std::abs(a(i, j)));
  }
  if (m.max_abs() <= tol * entry * entry) {
    fail(ErrorCode::DegenerateMatrix, "all minors vanish: rows are dependent");
  }
  return m;
}

std::string kind_name(const BcKind& kind) {
  struct Visitor {
    std::string operator()(const StrengthenedRegular&) const {
      return "StrengthenedRegular";
    }
    std::string operator()(const RegularNotStrengthened&) const {
      return "RegularNotStrengthened";
    }
    std::string operator()(const Irregular&) const { return "Irregular"; }
    std::string operator()(const Degenerate&) const { return "Degenerate"; }
  };
  return std::visit(Visitor{}, kind);
}

std::string subtype_name(RegularSubtype s) {
  switch (s) {
    case RegularSubtype::I: return "I";
    case RegularSubtype::II: return "II";
    case RegularSubtype::III: return "III";
  }
  return "?";
}

BcClass classify(const BcMatrix& a, double tol) {
  if (!(tol > 0.0)) fail(ErrorCode::InvalidInput, "tolerance must be positive");
  const Minors m = minors(a);
  const double scale = m.max_abs();
  auto zero = [&](cplx x) { return std::abs(x) <= tol * scale; };
  auto eq = [&](cplx x, cplx y) { return std::abs(x - y) <= tol * scale; };

  const cplx s = m.a14 + m.a23;
  const cplx t = m.a13 + m.a24;
  CanonicalParameters p;

  if (zero(m.a12) && zero(s) && zero(m.a34)) {
    if (!zero(m.a13) && !zero(m.a23)) {
      const cplx d = m.a23 / m.a13;
      p.d = d;
      return {Degenerate{DegenerateVariant::VisualForm, d}, p,
              BcMatrix::degenerate(d), m};
    }
    if (!zero(m.a13)) {
      // d = 0: the pure initial-value conditions u'(0) = u(0) = 0
      p.d = cplx{0.0, 0.0};
      return {Degenerate{DegenerateVariant::CauchyLike, 0.0}, p,
              BcMatrix({1, 0, 0, 0}, {0, 0, 1, 0}), m};
    }
    return {Degenerate{DegenerateVariant::CauchyLike, 0.0}, p,
            BcMatrix({0, 1, 0, 0}, {0, 0, 0, 1}), m};
  }

  if (!zero(m.a12)) {
    return {StrengthenedRegular{1}, p, a.rref(), m};
  }

  if (!zero(s)) {
    int theta = -1;
    if (eq(s, -t)) {
      theta = 0;
    } else if (eq(s, t)) {
      theta = 1;
    }
    if (theta < 0) return {StrengthenedRegular{2}, p, a.rref(), m};

    p.theta = theta;
    const double sigma = theta == 0 ? -1.0 : 1.0;
    if (eq(m.a14, m.a23)) {
      if (zero(m.a34)) {
        return {RegularNotStrengthened{theta, RegularSubtype::I}, p,
                BcMatrix({1, sigma, 0, 0}, {0, 0, 1, sigma}), m};
      }
      const cplx a14 = -m.a34 / m.a13;
      p.a14 = a14;
      return {RegularNotStrengthened{theta, RegularSubtype::II}, p,
              BcMatrix({1.0, sigma, 0.0, a14}, {0.0, 0.0, 1.0, sigma}), m};
    }
    return {RegularNotStrengthened{theta, RegularSubtype::III}, p, a.rref(), m};
  }

  // A12 = 0, A14 + A23 = 0, A34 != 0
  if (zero(t)) {
    if (eq(m.a13, m.a24)) return {StrengthenedRegular{3}, p, a.rref(), m};
    const cplx sign = m.a23 / m.a13;
    const double s1 = sign.real() >= 0.0 ? 1.0 : -1.0;
    const cplx b0 = -m.a34 / m.a13;
    p.b1 = s1;
    p.b0 = b0;
    return {Irregular{1}, p, BcMatrix({1.0, s1, 0.0, b0}, {0.0, 0.0, 1.0, -s1}),
            m};
  }
  if (!zero(m.a13)) {
    const cplx b1 = m.a23 / m.a13;
    const cplx b0 = -m.a34 / m.a13;
    p.b1 = b1;
    p.b0 = b0;
    return {Irregular{2}, p, BcMatrix({1.0, b1, 0.0, b0}, {0.0, 0.0, 1.0, -b1}),
            m};
  }
  const cplx a0 = m.a34 / m.a24;
  p.a0 = a0;
  return {Irregular{3}, p, BcMatrix({0.0, 1.0, a0, 0.0}, {0.0, 0.0, 0.0, 1.0}),
          m};
}

BcMatrix canonical_form(const BcMatrix& a, double tol) {
  return classify(a, tol).canonical;
}

bool row_equivalent(const BcMatrix& a, const BcMatrix& b, double tol) {
  const auto ma = as_array(a.minors());
  const auto mb = as_array(b.minors());
  std::size_t k = 0;
  for (std::size_t i = 1; i < ma.size(); ++i) {
    if (std::abs(ma[i]) > std::abs(ma[k])) k = i;
  }
  const cplx factor = mb[k] / ma[k];
  double scale = 0.0;
  for (const cplx& v : mb) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (std::abs(mb[i] - factor * ma[i]) > tol * scale) return false;
  }
  return true;
}

}  // namespace slspec
