#pragma once

#include <memory>
#include <optional>

#include "slspec/bc.hpp"
#include "slspec/ode.hpp"
#include "slspec/potential.hpp"

namespace slspec {

enum class Normalization { Raw, DegenerateVisual };

struct DetOptions {
  OdeOptions ode;
  /// Skip the closed forms for zero and constant q and always integrate.
  bool force_integration = false;
  bool cache = true;
};

/// Characteristic determinant of u'' - q u + lambda u = 0 under A.
///
/// Copies are cheap and share the memo cache, which is safe for concurrent
/// use. Values are keyed on lambda = mu^2, so mu and -mu share entries.
class DetEvaluator {
 public:
  DetEvaluator(Potential q, BcMatrix a, DetOptions opt = {});

  /// Normalized evaluator for u'(0) + d u'(pi) = 0, u(0) - d u(pi) = 0,
  /// returning Delta / d = (d^2 - 1)/d + c(pi) - s'(pi).
  static DetEvaluator degenerate_visual(Potential q, cplx d, DetOptions opt = {});

  cplx delta(cplx mu) const;
  cplx operator()(cplx mu) const { return delta(mu); }
  /// d^j Delta / dlambda^j for j = 1..3, always from the variational system.
  cplx lambda_derivative(cplx mu, int order) const;

  /// Fundamental values with at least m lambda-derivatives.
  FundamentalValues fundamental(cplx mu, int m = 0) const;

  const Potential& potential() const { return *q_; }
  const BcMatrix& bc() const { return a_; }
  const Minors& minors() const { return minors_; }
  Normalization normalization() const { return norm_; }
  /// The d parameter of a DegenerateVisual evaluator.
  std::optional<cplx> visual_d() const { return d_; }
  const DetOptions& options() const { return opt_; }

  /// Number of fundamental-system evaluations performed (cache misses).
  std::size_t evaluations() const;
  void clear_cache() const;

 private:
  struct Cache;

  cplx combine(const std::array<cplx, 4>& v, bool with_constant) const;
  FundamentalValues compute(cplx mu, int m) const;

  std::shared_ptr<const Potential> q_;
  BcMatrix a_;
  Minors minors_;
  DetOptions opt_;
  Normalization norm_ = Normalization::Raw;
  std::optional<cplx> d_;
  std::shared_ptr<Cache> cache_;
};

/// Free determinant (q = 0) from the minors in closed form.
cplx delta0(const BcMatrix& a, cplx mu);
cplx delta0(const Minors& m, cplx mu);

/// Delta from minors and fundamental values at pi.
cplx delta_from(const Minors& m, const FundamentalValues& f);

/// Convenience wrapper over DetEvaluator::lambda_derivative.
cplx delta_lambda_derivative(const DetEvaluator& ev, cplx mu, int order);

}  // namespace slspec
