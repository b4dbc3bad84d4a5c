#include "slspec/chardet.hpp"

#include <atomic>
#include <bit>
#include <cstdint>
#include <cmath>
#include <mutex>
#include <unordered_map>

namespace slspec {

namespace {

struct Key {
  std::uint64_t re;
  std::uint64_t im;
  bool operator==(const Key&) const = default;
};

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    return std::hash<std::uint64_t>{}(k.re * 0x9E3779B97F4A7C15ull ^ k.im);
  }
};

Key key_of(cplx lambda) {
  // fold -0.0 onto 0.0 so that symmetric mu hit the same slot
  const double re = lambda.real() == 0.0 ? 0.0 : lambda.real();
  const double im = lambda.imag() == 0.0 ? 0.0 : lambda.imag();
  return {std::bit_cast<std::uint64_t>(re), std::bit_cast<std::uint64_t>(im)};
}

}  // namespace

struct DetEvaluator::Cache {
  std::mutex mu;
  std::unordered_map<Key, FundamentalValues, KeyHash> map;
  std::atomic<std::size_t> evaluations{0};
};

DetEvaluator::DetEvaluator(Potential q, BcMatrix a, DetOptions opt)
    : q_(std::make_shared<const Potential>(std::move(q))),
      a_(std::move(a)),
      minors_(slspec::minors(a_)),
      opt_(opt),
      cache_(std::make_shared<Cache>()) {
  if (!(opt_.ode.tol >= 1e-13 && opt_.ode.tol <= 1e-4)) {
    fail(ErrorCode::InvalidInput, "integrator tolerance must lie in [1e-13, 1e-4]");
  }
}

DetEvaluator DetEvaluator::degenerate_visual(Potential q, cplx d, DetOptions opt) {
  if (d == cplx{}) {
    fail(ErrorCode::InvalidInput,
         "d = 0 gives the Cauchy conditions, which have no eigenvalues");
  }
  DetEvaluator ev(std::move(q), BcMatrix::degenerate(d), opt);
  ev.norm_ = Normalization::DegenerateVisual;
  ev.d_ = d;
  return ev;
}

FundamentalValues DetEvaluator::compute(cplx mu, int m) const {
  if (m == 0 && !opt_.force_integration) {
    if (q_->is_zero()) return free_fundamental(mu);
    if (auto q0 = q_->constant_value()) {
      // constant q shifts lambda: mu_eff^2 = mu^2 - q0
      const cplx me = std::sqrt(mu * mu - *q0);
      FundamentalValues f = free_fundamental(me);
      f.mu = mu;
      return f;
    }
  }
  cache_->evaluations.fetch_add(1, std::memory_order_relaxed);
  return fundamental_at_pi(*q_, mu, m, opt_.ode);
}

FundamentalValues DetEvaluator::fundamental(cplx mu, int m) const {
  if (!opt_.cache) return compute(mu, m);
  const Key k = key_of(mu * mu);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->map.find(k);
    if (it != cache_->map.end() &&
        it->second.dlambda.size() >= static_cast<std::size_t>(m)) {
      FundamentalValues f = it->second;
      f.mu = mu;
      return f;
    }
  }
  FundamentalValues f = compute(mu, m);
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto& slot = cache_->map[k];
  if (slot.dlambda.size() <= f.dlambda.size()) slot = f;
  return f;
}

cplx DetEvaluator::combine(const std::array<cplx, 4>& v, bool with_constant) const {
  const cplx c = v[0], cp = v[1], s = v[2], sp = v[3];
  if (norm_ == Normalization::DegenerateVisual) {
    const cplx d = *d_;
    return (c - sp) + (with_constant ? (d * d - 1.0) / d : cplx{});
  }
  const Minors& m = minors_;
  const cplx base = with_constant ? -m.a13 - m.a24 : cplx{};
  // the growing terms first: they cancel exactly for degenerate forms
  return (m.a34 * s - m.a23 * sp - m.a14 * c - m.a12 * cp) + base;
}

cplx DetEvaluator::delta(cplx mu) const {
  const FundamentalValues f = fundamental(mu, 0);
  return combine({f.c, f.cp, f.s, f.sp}, true);
}

cplx DetEvaluator::lambda_derivative(cplx mu, int order) const {
  if (order < 1 || order > 3) {
    fail(ErrorCode::InvalidInput, "lambda-derivative order must be 1, 2 or 3");
  }
  const FundamentalValues f = fundamental(mu, order);
  return combine(f.dlambda[static_cast<std::size_t>(order) - 1], false);
}

std::size_t DetEvaluator::evaluations() const {
  return cache_->evaluations.load(std::memory_order_relaxed);
}

void DetEvaluator::clear_cache() const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->map.clear();
}

cplx delta0(const Minors& m, cplx mu) {
  const cplx cosv = std::cos(kPi * mu);
  return -m.a13 - m.a24 + m.a34 * sinc_pi(mu) - (m.a23 + m.a14) * cosv +
         m.a12 * mu * std::sin(kPi * mu);
}

cplx delta0(const BcMatrix& a, cplx mu) { return delta0(a.minors(), mu); }

cplx delta_from(const Minors& m, const FundamentalValues& f) {
  return -m.a13 - m.a24 + m.a34 * f.s - m.a23 * f.sp - m.a14 * f.c - m.a12 * f.cp;
}

cplx delta_lambda_derivative(const DetEvaluator& ev, cplx mu, int order) {
  return ev.lambda_derivative(mu, order);
}

}  // namespace slspec
