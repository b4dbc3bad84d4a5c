#include "slspec/degenerate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "slspec/contour.hpp"
#include "slspec/parallel.hpp"

namespace slspec {

namespace {

constexpr double kZeroSnap = 1e-9;

double radical_inverse(int n, int base) {
  double f = 1.0, r = 0.0;
  while (n > 0) {
    f /= base;
    r += f * (n % base);
    n /= base;
  }
  return r;
}

bool is_power_of_two(std::int64_t k) { return k > 0 && (k & (k - 1)) == 0; }

int floor_log2(std::int64_t k) {
  return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(k))) - 1;
}

// a_1..a_n (one extra term so that h_{n-1} is defined by the caller).
std::vector<std::int64_t> build_a(int n) {
  std::vector<std::int64_t> a = {1, 3, 5};
  a.resize(static_cast<std::size_t>(std::max(n, 3)));
  for (int k = 3; k < n; ++k) {
    const std::int64_t ak = a[static_cast<std::size_t>(k - 1)];
    const std::int64_t prev = a[static_cast<std::size_t>(k - 2)];
    if (is_power_of_two(k) && k >= 4) {
      a[static_cast<std::size_t>(k)] = ak + (ak - prev) + 2;
    } else {
      a[static_cast<std::size_t>(k)] = ak + 2 * floor_log2(k);
    }
  }
  a.resize(static_cast<std::size_t>(n));
  return a;
}

Example1Sequence build_example1(int k_max) {
  Example1Sequence s;
  const std::vector<std::int64_t> a = build_a(k_max + 1);
  for (int k = 1; k <= k_max; ++k) {
    const int delta = (is_power_of_two(k) && k >= 4) ? 1 : 0;
    s.a.push_back(a[static_cast<std::size_t>(k - 1)]);
    s.delta.push_back(delta);
    s.h.push_back(a[static_cast<std::size_t>(k)] - a[static_cast<std::size_t>(k - 1)] - delta);
  }
  return s;
}

// Bound on sum_{k > k_max} h_k / a_k^2: explicit terms up to K, then
// h_k / a_k^2 <= (a_{k+1}/a_k)(1/a_k - 1/a_{k+1}) telescopes to rho / a_{K+1}.
double tail_sum_bound(int k_max) {
  const int big = std::max(32 * k_max, 4096);
  const Example1Sequence s = build_example1(big + 1);
  double sum = 0.0;
  for (int k = k_max + 1; k <= big; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    const double ak = static_cast<double>(s.a[i]);
    sum += static_cast<double>(s.h[i]) / (ak * ak);
  }
  // gaps are at most 2 log2 k + 4 and a_k >= 2k - 1
  const double kk = big + 1.0;
  const double rho = 1.0 + (2.0 * std::log2(kk) + 4.0) / (2.0 * kk - 1.0);
  return sum + rho / static_cast<double>(s.a[static_cast<std::size_t>(big)]);
}

double zero_separation(const std::vector<ProductZero>& zeros, std::size_t i, bool leading_mu) {
  const cplx z = zeros[i].location;
  double sep = leading_mu ? std::abs(z) : std::numeric_limits<double>::infinity();
  sep = std::min(sep, 2.0 * std::abs(z.real()));
  for (std::size_t j = 0; j < zeros.size(); ++j) {
    if (j == i) continue;
    sep = std::min(sep, std::abs(z - zeros[j].location));
  }
  return sep;
}

}  // namespace

std::string to_string(DegenerateCase c) {
  switch (c) {
    case DegenerateCase::NoEigenvalues: return "NoEigenvalues";
    case DegenerateCase::CountableDiscrete: return "CountableDiscrete";
    case DegenerateCase::WholePlane: return "WholePlane";
  }
  return "?";
}

DegenerateClassification classify_degenerate(const Potential& q, cplx d, double tol,
                                             int probes) {
  DegenerateClassification out;
  out.d = d;
  double qmax = 0.0;
  for (const cplx& v : q.values()) qmax = std::max(qmax, std::abs(v));
  out.symmetry_defect = symmetry_defect(q).norm;
  out.symmetric = out.symmetry_defect <= tol * (1.0 + kPi * qmax);
  if (d == cplx{}) {
    out.kind = DegenerateCase::NoEigenvalues;
    out.note = "d = 0 gives the Cauchy conditions u(0) = u'(0) = 0, which have no eigenvalues";
    return out;
  }
  if (!out.symmetric) {
    out.kind = DegenerateCase::CountableDiscrete;
    return out;
  }
  const bool unit = std::abs(d - 1.0) <= tol || std::abs(d + 1.0) <= tol;
  out.kind = unit ? DegenerateCase::WholePlane : DegenerateCase::NoEigenvalues;

  const DetEvaluator ev = DetEvaluator::degenerate_visual(q, d);
  const cplx level = (d * d - 1.0) / d;
  std::vector<double> dev(static_cast<std::size_t>(std::max(probes, 0)));
  parallel_for(dev.size(), [&](std::size_t i) {
    const int n = static_cast<int>(i) + 1;
    const cplx mu{0.1 + 9.9 * radical_inverse(n, 2), -2.0 + 4.0 * radical_inverse(n, 3)};
    dev[i] = std::abs(ev(mu) - level);
  });
  out.probe_deviation = dev.empty() ? 0.0 : *std::max_element(dev.begin(), dev.end());
  return out;
}

std::pair<cplx, cplx> gamma_d_maps(cplx gamma) {
  const cplx root = std::sqrt(gamma * gamma + 4.0);
  const cplx plus = 0.5 * (gamma + root);
  const cplx minus = 0.5 * (gamma - root);
  // the smaller root loses digits to cancellation; Vieta recovers it
  if (std::abs(plus) >= std::abs(minus)) return {plus, -1.0 / plus};
  return {-1.0 / minus, minus};
}

cplx d_to_gamma(cplx d) {
  if (d == cplx{}) fail(ErrorCode::InvalidInput, "d must be nonzero");
  return d - 1.0 / d;
}

Example1Sequence example1_sequence(int k_max) {
  if (k_max < 4) fail(ErrorCode::InvalidInput, "k_max must be at least 4");
  return build_example1(k_max);
}

Example2Sequence example2_sequence(int k_max) {
  if (k_max < 2) fail(ErrorCode::InvalidInput, "k_max must be at least 2");
  const Example1Sequence base = build_example1(k_max);
  Example2Sequence s;
  s.a = base.a;
  s.h = base.h;
  std::int64_t prev = 0;
  for (std::int64_t ak : base.a) {
    const double a = static_cast<double>(ak);
    const double beta = static_cast<double>(ak - prev) / 10.0;
    const double root = std::sqrt((a - beta) * (a + beta));
    s.beta.push_back(beta);
    s.alpha.push_back(beta * beta / (a + root));
    s.a_tilde.emplace_back(root, beta);
    prev = ak;
  }
  return s;
}

ProductSpec make_product_spec(ProductKind kind, int k_max, int drop_prefix, bool leading_mu) {
  if (k_max < 4) fail(ErrorCode::InvalidInput, "k_max must be at least 4");
  if (drop_prefix < 0 || drop_prefix >= k_max) {
    fail(ErrorCode::InvalidInput, "drop_prefix must lie in [0, k_max)");
  }
  ProductSpec spec;
  spec.kind = kind;
  spec.k_max = k_max;
  spec.drop_prefix = drop_prefix;
  spec.leading_mu = leading_mu;
  const Example1Sequence s1 = build_example1(k_max);
  spec.a = s1.a;
  spec.delta = s1.delta;
  spec.h = s1.h;
  if (kind == ProductKind::Example2) {
    const Example2Sequence s2 = example2_sequence(k_max);
    spec.alpha = s2.alpha;
    spec.beta = s2.beta;
    spec.a_tilde = s2.a_tilde;
  }
  for (int k = drop_prefix + 1; k <= k_max; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    const int h = static_cast<int>(spec.h[i]);
    const double a = static_cast<double>(spec.a[i]);
    if (kind == ProductKind::Example1) {
      spec.zeros.push_back({a, h, k});
      continue;
    }
    const int half = h / 2;
    if (half > 0) {
      spec.zeros.push_back({spec.a_tilde[i], half, k});
      spec.zeros.push_back({std::conj(spec.a_tilde[i]), half, k});
    }
    if (h - 2 * half > 0) spec.zeros.push_back({a, h - 2 * half, k});
  }
  spec.tail_sum = tail_sum_bound(k_max);
  return spec;
}

ProductValue product_eval(const ProductSpec& spec, cplx mu) {
  const double r = std::abs(mu);
  const double a_top = static_cast<double>(spec.a.back());
  if (r >= 0.5 * a_top) {
    fail(ErrorCode::InsufficientTruncation,
         "|mu| must stay below a_kmax / 2 = " + std::to_string(0.5 * a_top));
  }
  ProductValue out;
  const double a_next = static_cast<double>(spec.a.back() + spec.h.back() +
                                            spec.delta.back());
  out.tail_bound = r * r / (1.0 - r * r / (a_next * a_next)) * spec.tail_sum;
  if (spec.leading_mu && r <= kZeroSnap) {
    out.value = 0.0;
    out.zero_multiplicity = 1;
    return out;
  }
  for (const ProductZero& z : spec.zeros) {
    if (std::abs(mu - z.location) <= kZeroSnap || std::abs(mu + z.location) <= kZeroSnap) {
      out.value = 0.0;
      out.zero_multiplicity = z.multiplicity;
      return out;
    }
  }
  const cplx mu2 = mu * mu;
  cplx log_sum = 0.0;
  for (const ProductZero& z : spec.zeros) {
    log_sum += static_cast<double>(z.multiplicity) *
               std::log(1.0 - mu2 / (z.location * z.location));
  }
  // the even part depends on mu^2 only, so f(-mu) = -f(mu) holds bitwise
  out.value = std::exp(log_sum);
  if (spec.leading_mu) out.value *= mu;
  return out;
}

GrowthBound growth_bound_check(const ProductSpec& spec, const std::vector<double>& x_grid,
                               int m) {
  if (m < 0) fail(ErrorCode::InvalidInput, "M must be nonnegative");
  if (x_grid.size() < 4) fail(ErrorCode::InvalidInput, "growth grid needs at least 4 points");
  std::vector<double> mod(x_grid.size());
  parallel_for(x_grid.size(), [&](std::size_t i) {
    mod[i] = std::abs(product_eval(spec, x_grid[i]).value);
  });
  double x_top = 0.0;
  for (double x : x_grid) x_top = std::max(x_top, std::abs(x));

  auto judge = [&](int power, std::vector<double>* ratios) {
    double top = 0.0, rest = 0.0;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const double ax = std::abs(x_grid[i]);
      const double ratio = mod[i] / std::pow(ax + 1.0, power);
      if (ratios) ratios->push_back(ratio);
      if (ax >= 0.5 * x_top) {
        top = std::max(top, ratio);
      } else {
        rest = std::max(rest, ratio);
      }
    }
    return top <= rest;
  };

  GrowthBound out;
  out.bounded = judge(m, &out.ratios);
  out.c_hat = *std::max_element(out.ratios.begin(), out.ratios.end());
  for (int power = 0; power <= 64; ++power) {
    if (judge(power, nullptr)) {
      out.empirical_m = power;
      break;
    }
  }
  return out;
}

PwEvidence pw_membership_check(const ProductSpec& spec, double R, double half_strip,
                               double y_min) {
  const double limit = 0.5 * static_cast<double>(spec.a.back());
  if (R >= limit || half_strip >= limit) {
    fail(ErrorCode::InsufficientTruncation,
         "R and half_strip must stay below a_kmax / 2 = " + std::to_string(limit));
  }
  if (!(R >= 2.0) || !(half_strip > y_min) || !(y_min > 0.0)) {
    fail(ErrorCode::InvalidInput, "need R >= 2 and 0 < y_min < half_strip");
  }
  PwEvidence out;

  // oddness on a scattered set inside the disc of radius min(R, half_strip)
  const double rad = std::min(R, half_strip);
  std::vector<double> odd(256);
  parallel_for(odd.size(), [&](std::size_t i) {
    const int n = static_cast<int>(i) + 1;
    const double rho = rad * std::sqrt(radical_inverse(n, 2));
    const double phi = 2.0 * kPi * radical_inverse(n, 3);
    const cplx mu = std::polar(rho, phi);
    odd[i] = std::abs(product_eval(spec, mu).value + product_eval(spec, -mu).value);
  });
  out.odd_defect = *std::max_element(odd.begin(), odd.end());

  // |f(-x)| = |f(x)|, so each band counts twice
  for (int j = 0; std::ldexp(1.0, j + 1) <= R; ++j) {
    const double lo = std::ldexp(1.0, j);
    const double hi = 2.0 * lo;
    const std::size_t n = static_cast<std::size_t>(256.0 * lo) + 1;  // even intervals
    std::vector<double> sq(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    parallel_for(n, [&](std::size_t i) {
      sq[i] = std::norm(product_eval(spec, lo + h * static_cast<double>(i)).value);
    });
    double acc = sq.front() + sq.back();
    for (std::size_t i = 1; i + 1 < n; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * sq[i];
    out.l2_tail_trend.push_back(2.0 * acc * h / 3.0);
  }

  const int ny = 64;
  out.type_y.resize(ny);
  out.type_ratios.resize(ny);
  parallel_for(static_cast<std::size_t>(ny), [&](std::size_t i) {
    const double y = y_min + (half_strip - y_min) * static_cast<double>(i) / (ny - 1);
    out.type_y[i] = y;
    const ProductValue v = product_eval(spec, cplx{0.0, y});
    out.type_ratios[i] = (std::log(std::abs(v.value)) + v.tail_bound) / y;
  });
  out.type_estimate = *std::max_element(out.type_ratios.begin(), out.type_ratios.end());
  return out;
}

NonclassicalReport nonclassical_spectrum_report(const ProductSpec& spec) {
  if (spec.k_max < 16) fail(ErrorCode::InvalidInput, "k_max must be at least 16");
  NonclassicalReport out;
  SpectrumReport& rep = out.spectrum;
  const double limit = 0.5 * static_cast<double>(spec.a.back());

  double re1 = 0.0, im_lo = 0.0, im_hi = 0.0;
  std::vector<std::size_t> check;
  for (std::size_t i = 0; i < spec.zeros.size(); ++i) {
    const ProductZero& z = spec.zeros[i];
    const double radius = std::min(0.4 * zero_separation(spec.zeros, i, spec.leading_mu), 0.1);
    EigenvalueRecord rec;
    rec.mu = z.location;
    rec.lambda = z.location * z.location;
    rec.multiplicity = z.multiplicity;
    rec.box = Rect::around(z.location, radius, radius);
    rec.index_hint = std::make_pair(z.k, z.multiplicity);
    rep.records.push_back(rec);
    re1 = std::max(re1, z.location.real());
    im_lo = std::min(im_lo, z.location.imag());
    im_hi = std::max(im_hi, z.location.imag());
    if (spec.kind == ProductKind::Example2) out.im_growth.push_back(std::abs(z.location.imag()));
    const bool sampled = z.k <= 12 || z.k % 4 == 0;
    if (sampled && std::abs(z.location) + radius < limit) check.push_back(i);
  }
  rep.scan_region = {0.0, re1, im_lo, im_hi};
  rep.classification = SpectrumClass::CountableDiscrete;
  if (spec.leading_mu) rep.notes.push_back("simple zero of the leading factor mu at the origin");

  std::vector<int> wound(check.size());
  parallel_for(check.size(), [&](std::size_t j) {
    const EigenvalueRecord& rec = rep.records[check[j]];
    const double radius = 0.5 * rec.box.width();
    const ComplexFn f = [&](cplx mu) { return product_eval(spec, mu).value; };
    wound[j] = winding_circle(f, rec.mu, radius).count;
  });
  for (std::size_t j = 0; j < check.size(); ++j) {
    EigenvalueRecord& rec = rep.records[check[j]];
    if (wound[j] != rec.multiplicity) {
      fail(ErrorCode::InternalConsistency,
           "winding " + std::to_string(wound[j]) + " disagrees with multiplicity " +
               std::to_string(rec.multiplicity) + " at k = " +
               std::to_string(spec.zeros[check[j]].k));
    }
    rec.verified = true;
    out.winding_checked.push_back(spec.zeros[check[j]].k);
  }
  for (const auto& rec : rep.records) rep.max_multiplicity = std::max(rep.max_multiplicity, rec.multiplicity);
  out.growth = multiplicity_growth_check(rep);

  // m / ln a_k per dyadic block of k, from the full multiplicity h_k
  for (int p = 2; (1 << p) <= spec.k_max; ++p) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int k = 1 << p; k < (2 << p) && k <= spec.k_max; ++k) {
      const auto i = static_cast<std::size_t>(k - 1);
      const double ratio = static_cast<double>(spec.h[i]) / std::log(static_cast<double>(spec.a[i]));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    out.ratio_min_per_block.push_back(lo);
    out.ratio_max_per_block.push_back(hi);
  }
  return out;
}

}  // namespace slspec
