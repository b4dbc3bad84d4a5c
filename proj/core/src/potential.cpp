#include "slspec/potential.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace slspec {

namespace {

constexpr double kGridTol = 1e-12;

// PCHIP slope for one real component.
std::vector<double> pchip_slopes(std::span<const double> x,
                                 const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), d(n - 1), m(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    d[i] = (y[i + 1] - y[i]) / h[i];
  }
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
    }
  }
  return m;
}

std::vector<double> uniform_nodes(std::size_t samples) {
  std::vector<double> x(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    x[i] = kPi * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  x.back() = kPi;
  return x;
}

std::vector<double> trapezoid_weights(std::span<const double> x) {
  std::vector<double> w(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double h = x[i + 1] - x[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

// Taylor shift p(x) -> p(pi - x).
std::vector<cplx> reflect_poly(const std::vector<cplx>& c) {
  const std::size_t n = c.size();
  std::vector<cplx> out(n, 0.0);
  // (pi - x)^k = sum_j C(k,j) pi^(k-j) (-x)^j
  for (std::size_t k = 0; k < n; ++k) {
    double binom = 1.0;
    for (std::size_t j = 0; j <= k; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      out[j] += c[k] * binom * std::pow(kPi, static_cast<double>(k - j)) * sign;
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
    }
  }
  return out;
}

}  // namespace

Potential::Potential(std::vector<double> grid, std::vector<cplx> values,
                     ClosedForm closed_form,
                     std::vector<EndpointDerivative> endpoint_derivs)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      closed_form_(std::move(closed_form)),
      endpoint_derivs_(std::move(endpoint_derivs)) {
  if (grid_.size() != values_.size()) {
    fail(ErrorCode::InvalidInput, "potential grid and values differ in length");
  }
  if (grid_.size() < kMinSamples) {
    fail(ErrorCode::InvalidInput, "potential needs at least 16 samples");
  }
  if (std::abs(grid_.front()) > kGridTol ||
      std::abs(grid_.back() - kPi) > kGridTol) {
    fail(ErrorCode::InvalidInput, "potential grid must span [0, pi]");
  }
  grid_.front() = 0.0;
  grid_.back() = kPi;
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    if (!(grid_[i + 1] > grid_[i])) {
      fail(ErrorCode::InvalidInput, "potential grid must be strictly increasing");
    }
  }
  for (const cplx& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      fail(ErrorCode::InvalidInput, "potential samples must be finite");
    }
  }
  if (closed_form_.kind == ClosedForm::Kind::Zero) {
    for (const cplx& v : values_) {
      if (v != cplx{0.0, 0.0}) {
        fail(ErrorCode::InvalidInput,
             "closed form 'zero' requires all samples to be exactly 0");
      }
    }
  }
  if (closed_form_.kind == ClosedForm::Kind::Polynomial &&
      closed_form_.poly.empty()) {
    closed_form_.kind = ClosedForm::Kind::Zero;
  }

  const std::size_t n = grid_.size();
  const double h = kPi / static_cast<double>(n - 1);
  grid_kind_ = GridKind::Uniform;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs((grid_[i + 1] - grid_[i]) - h) > 1e-9 * h) {
      grid_kind_ = GridKind::Explicit;
      break;
    }
  }
  symmetric_grid_ = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(grid_[i] + grid_[n - 1 - i] - kPi) > kGridTol) {
      symmetric_grid_ = false;
      break;
    }
  }

  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = values_[i].real();
    im[i] = values_[i].imag();
  }
  const auto mr = pchip_slopes(grid_, re);
  const auto mi = pchip_slopes(grid_, im);
  slopes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) slopes_[i] = {mr[i], mi[i]};
}

Potential Potential::zero(std::size_t samples) {
  return Potential(uniform_nodes(samples), std::vector<cplx>(samples, 0.0),
                   ClosedForm{ClosedForm::Kind::Zero, {}});
}

Potential Potential::constant(cplx value, std::size_t samples) {
  if (value == cplx{0.0, 0.0}) return zero(samples);
  return polynomial({value}, samples);
}

Potential Potential::polynomial(std::vector<cplx> coeffs, std::size_t samples) {
  auto x = uniform_nodes(samples);
  std::vector<cplx> v(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    cplx acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
      acc = acc * x[i] + *it;
    }
    v[i] = acc;
  }
  const bool all_zero = std::all_of(coeffs.begin(), coeffs.end(),
                                    [](cplx c) { return c == cplx{}; });
  if (all_zero) return zero(samples);
  return Potential(std::move(x), std::move(v),
                   ClosedForm{ClosedForm::Kind::Polynomial, std::move(coeffs)});
}

Potential Potential::sampled(const std::function<cplx(double)>& f,
                             std::size_t samples) {
  auto x = uniform_nodes(samples);
  std::vector<cplx> v(samples);
  for (std::size_t i = 0; i < samples; ++i) v[i] = f(x[i]);
  return Potential(std::move(x), std::move(v),
                   ClosedForm{ClosedForm::Kind::Tabulated, {}});
}

bool Potential::has_analytic_form() const {
  return closed_form_.kind == ClosedForm::Kind::Zero ||
         closed_form_.kind == ClosedForm::Kind::Polynomial;
}

std::optional<cplx> Potential::constant_value() const {
  if (closed_form_.kind == ClosedForm::Kind::Zero) return cplx{0.0, 0.0};
  if (closed_form_.kind == ClosedForm::Kind::Polynomial) {
    const auto& c = closed_form_.poly;
    for (std::size_t k = 1; k < c.size(); ++k) {
      if (c[k] != cplx{}) return std::nullopt;
    }
    return c.front();
  }
  return std::nullopt;
}

std::size_t Potential::locate(double x) const {
  const std::size_t n = grid_.size();
  if (x <= 0.0) return 0;
  if (x >= kPi) return n - 2;
  if (grid_kind_ == GridKind::Uniform) {
    const double h = kPi / static_cast<double>(n - 1);
    auto i = static_cast<std::size_t>(x / h);
    i = std::min(i, n - 2);
    // guard against rounding at node boundaries
    if (i > 0 && x < grid_[i]) --i;
    if (i + 2 < n && x >= grid_[i + 1]) ++i;
    return i;
  }
  auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
  auto i = static_cast<std::size_t>(std::distance(grid_.begin(), it));
  return std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, n - 2);
}

cplx Potential::poly_eval(double x, int derivative) const {
  const auto& c = closed_form_.poly;
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > static_cast<std::size_t>(derivative);) {
    double factor = 1.0;
    for (int j = 0; j < derivative; ++j) factor *= static_cast<double>(k - j);
    acc = acc * x + c[k] * factor;
  }
  return acc;
}

cplx Potential::operator()(double x) const {
  switch (closed_form_.kind) {
    case ClosedForm::Kind::Zero: return 0.0;
    case ClosedForm::Kind::Polynomial: return poly_eval(x, 0);
    default: break;
  }
  const std::size_t i = locate(x);
  const double h = grid_[i + 1] - grid_[i];
  const double t = (x - grid_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] +
         h11 * h * slopes_[i + 1];
}

cplx Potential::linear(double x) const {
  switch (closed_form_.kind) {
    case ClosedForm::Kind::Zero: return 0.0;
    case ClosedForm::Kind::Polynomial: return poly_eval(x, 0);
    default: break;
  }
  const std::size_t i = locate(x);
  const double t = (x - grid_[i]) / (grid_[i + 1] - grid_[i]);
  return (1.0 - t) * values_[i] + t * values_[i + 1];
}

std::vector<double> Potential::breakpoints() const {
  if (has_analytic_form()) return {};
  return {grid_.begin() + 1, grid_.end() - 1};
}

Potential Potential::conjugated() const {
  std::vector<cplx> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(),
                 [](cplx z) { return std::conj(z); });
  ClosedForm cf = closed_form_;
  for (auto& c : cf.poly) c = std::conj(c);
  auto d = endpoint_derivs_;
  for (auto& e : d) {
    e.at_zero = std::conj(e.at_zero);
    e.at_pi = std::conj(e.at_pi);
  }
  return Potential(grid_, std::move(v), std::move(cf), std::move(d));
}

Potential Potential::reflected() const {
  const std::size_t n = grid_.size();
  std::vector<double> x(n);
  std::vector<cplx> v(values_.rbegin(), values_.rend());
  if (symmetric_grid_) {
    x = grid_;
  } else {
    for (std::size_t i = 0; i < n; ++i) x[i] = kPi - grid_[n - 1 - i];
  }
  ClosedForm cf = closed_form_;
  if (cf.kind == ClosedForm::Kind::Polynomial) cf.poly = reflect_poly(cf.poly);
  auto d = endpoint_derivs_;
  for (auto& e : d) {
    const double sign = (e.order % 2 == 0) ? 1.0 : -1.0;
    const cplx z = e.at_zero;
    e.at_zero = sign * e.at_pi;
    e.at_pi = sign * z;
  }
  return Potential(std::move(x), std::move(v), std::move(cf), std::move(d));
}

Potential Potential::scaled(cplx factor) const {
  std::vector<cplx> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(),
                 [factor](cplx z) { return factor * z; });
  ClosedForm cf = closed_form_;
  for (auto& c : cf.poly) c *= factor;
  if (factor == cplx{} && cf.kind != ClosedForm::Kind::None) {
    cf = ClosedForm{ClosedForm::Kind::Zero, {}};
  }
  auto d = endpoint_derivs_;
  for (auto& e : d) {
    e.at_zero *= factor;
    e.at_pi *= factor;
  }
  return Potential(grid_, std::move(v), std::move(cf), std::move(d));
}

cplx derivative_at(const Potential& q, double x, int k) {
  if (k < 0) fail(ErrorCode::InvalidInput, "negative derivative order");
  switch (q.closed_form().kind) {
    case ClosedForm::Kind::Zero: return 0.0;
    case ClosedForm::Kind::Polynomial: return q.poly_eval(x, k);
    default:
      fail(ErrorCode::Unsupported,
           "analytic derivative requires a closed-form potential");
  }
}

cplx reflection_defect(const Potential& q, double x) {
  if (q.is_zero()) return 0.0;
  if (q.has_analytic_form()) return q(x) - q(kPi - x);
  const auto grid = q.grid();
  const auto vals = q.values();
  const std::size_t n = grid.size();
  if (q.symmetric_grid()) {
    // piecewise-linear interpolant of the mirrored sample differences
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = static_cast<std::size_t>(std::distance(grid.begin(), it));
    i = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, n - 2);
    const cplx d0 = vals[i] - vals[n - 1 - i];
    const cplx d1 = vals[i + 1] - vals[n - 2 - i];
    const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - t) * d0 + t * d1;
  }
  return q.linear(x) - q.linear(kPi - x);
}

SymmetryDefect symmetry_defect(const Potential& q) {
  const auto grid = q.grid();
  const auto vals = q.values();
  const std::size_t n = grid.size();
  if (n < Potential::kMinSamples) {
    fail(ErrorCode::InvalidInput, "grid too coarse to reflect");
  }
  SymmetryDefect out;
  out.x.assign(grid.begin(), grid.end());
  out.q_defect.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (q.symmetric_grid()) {
      out.q_defect[i] = vals[i] - vals[n - 1 - i];
    } else if (q.has_analytic_form()) {
      out.q_defect[i] = q(grid[i]) - q(kPi - grid[i]);
    } else {
      out.q_defect[i] = vals[i] - q.linear(kPi - grid[i]);
    }
  }
  const auto w = trapezoid_weights(grid);
  // Sum mirrored pairs first so reflected inputs give bit-identical norms.
  double total = 0.0;
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    total += w[i] * std::abs(out.q_defect[i]) + w[j] * std::abs(out.q_defect[j]);
  }
  if (n % 2 == 1) total += w[n / 2] * std::abs(out.q_defect[n / 2]);
  out.norm = total;
  return out;
}

EndpointTest endpoint_derivative_test(const Potential& q, int k, double tol) {
  if (k < 0) fail(ErrorCode::InvalidInput, "negative derivative order");
  EndpointTest out;
  cplx at0;
  cplx atpi;
  auto explicit_it =
      std::find_if(q.endpoint_derivs().begin(), q.endpoint_derivs().end(),
                   [k](const EndpointDerivative& e) { return e.order == k; });
  if (explicit_it != q.endpoint_derivs().end()) {
    at0 = explicit_it->at_zero;
    atpi = explicit_it->at_pi;
  } else if (q.has_analytic_form()) {
    at0 = derivative_at(q, 0.0, k);
    atpi = derivative_at(q, kPi, k);
  } else if (k == 0) {
    at0 = q.values().front();
    atpi = q.values().back();
  } else if (k == 1) {
    // three-point one-sided differences
    const auto x = q.grid();
    const auto v = q.values();
    const std::size_t n = x.size();
    auto one_sided = [](double x0, double x1, double x2, cplx f0, cplx f1,
                        cplx f2) {
      const double h1 = x1 - x0;
      const double h2 = x2 - x0;
      const double w1 = h2 / (h1 * (h2 - h1));
      const double w2 = -h1 / (h2 * (h2 - h1));
      return -(w1 + w2) * f0 + w1 * f1 + w2 * f2;
    };
    at0 = one_sided(x[0], x[1], x[2], v[0], v[1], v[2]);
    atpi = one_sided(x[n - 1], x[n - 2], x[n - 3], v[n - 1], v[n - 2], v[n - 3]);
  } else {
    fail(ErrorCode::Unsupported,
         "derivative order " + std::to_string(k) +
             " needs explicit endpoint data or a closed form");
  }
  out.lhs = at0;
  out.rhs = (k % 2 == 0 ? 1.0 : -1.0) * atpi;
  const double scale =
      std::max({1.0, std::abs(out.lhs), std::abs(out.rhs)});
  out.holds = std::abs(out.lhs - out.rhs) > tol * scale;
  return out;
}

namespace {

// Integral of Q over [a, pi].
cplx defect_integral(const Potential& q, double a) {
  if (q.is_zero()) return 0.0;
  if (q.has_analytic_form()) {
    static constexpr std::array<double, 10> node = {
        -0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
        -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
        0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
        0.9739065285171717};
    static constexpr std::array<double, 10> weight = {
        0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
        0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
        0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
        0.0666713443086881};
    const std::size_t degree = q.closed_form().poly.size();
    const int pieces = degree <= 19 ? 1 : 16;
    const double len = (kPi - a) / pieces;
    cplx acc = 0.0;
    for (int p = 0; p < pieces; ++p) {
      const double lo = a + p * len;
      const double mid = lo + 0.5 * len;
      for (std::size_t j = 0; j < node.size(); ++j) {
        acc += weight[j] * 0.5 * len * reflection_defect(q, mid + 0.5 * len * node[j]);
      }
    }
    return acc;
  }
  // Q is piecewise linear between the nodes and their mirror images.
  std::vector<double> cuts{a, kPi};
  for (double x : q.grid()) {
    if (x > a && x < kPi) cuts.push_back(x);
    if (!q.symmetric_grid()) {
      const double m = kPi - x;
      if (m > a && m < kPi) cuts.push_back(m);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cplx acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double h = cuts[i + 1] - cuts[i];
    if (h <= 0.0) continue;
    acc += 0.5 * h *
           (reflection_defect(q, cuts[i]) + reflection_defect(q, cuts[i + 1]));
  }
  return acc;
}

}  // namespace

EndpointLimit endpoint_defect_limit(const Potential& q, double rho,
                                    std::span<const double> h_grid,
                                    double tol) {
  if (!(rho > 0.0)) fail(ErrorCode::InvalidInput, "rho must be positive");
  if (h_grid.empty()) fail(ErrorCode::InvalidInput, "empty h grid");
  for (std::size_t i = 0; i < h_grid.size(); ++i) {
    if (!(h_grid[i] > 0.0 && h_grid[i] < kPi)) {
      fail(ErrorCode::InvalidInput, "h values must lie in (0, pi)");
    }
    if (i > 0 && !(h_grid[i] < h_grid[i - 1])) {
      fail(ErrorCode::InvalidInput, "h grid must be strictly decreasing");
    }
  }
  EndpointLimit out;
  for (double h : h_grid) {
    out.estimates.push_back(defect_integral(q, kPi - h) / std::pow(h, rho));
  }
  out.nu = out.estimates.back();
  if (out.estimates.size() >= 3) {
    const std::size_t n = out.estimates.size();
    const cplx e0 = out.estimates[n - 3];
    const cplx e1 = out.estimates[n - 2];
    const cplx e2 = out.estimates[n - 1];
    const double scale = std::max({1.0, std::abs(e0), std::abs(e1), std::abs(e2)});
    const double spread = std::max(
        {std::abs(e0 - e1), std::abs(e1 - e2), std::abs(e0 - e2)});
    out.converged = std::isfinite(spread) && spread <= tol * scale;
  }
  return out;
}

}  // namespace slspec
