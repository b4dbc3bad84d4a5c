#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slspec/chardet.hpp"
#include "slspec/common.hpp"
#include "slspec/potential.hpp"
#include "slspec/spectrum.hpp"

namespace slspec {

enum class DegenerateCase { NoEigenvalues, CountableDiscrete, WholePlane };

std::string to_string(DegenerateCase c);

struct DegenerateClassification {
  cplx d;
  bool symmetric = false;
  DegenerateCase kind = DegenerateCase::CountableDiscrete;
  double symmetry_defect = 0.0;
  /// max |Delta - (d^2 - 1)/d| over the probe set, visual normalization;
  /// only computed for symmetric q.
  std::optional<double> probe_deviation;
  std::string note;
};

/// Spectral case of u'(0) + d u'(pi) = 0, u(0) - d u(pi) = 0. A symmetric q
/// (q(x) = q(pi - x)) gives no eigenvalues for d != +-1 and the whole plane
/// for d = +-1; otherwise the spectrum is countable. d = 0 is the Cauchy
/// problem and reports NoEigenvalues with a note.
DegenerateClassification classify_degenerate(const Potential& q, cplx d, double tol = 1e-10,
                                             int probes = 40);

/// Roots of d^2 - gamma d - 1 = 0: (gamma +- sqrt(gamma^2 + 4)) / 2.
std::pair<cplx, cplx> gamma_d_maps(cplx gamma);
/// gamma = d - 1/d.
cplx d_to_gamma(cplx d);

/// Integer sequence with slowly growing gaps; index k = 1.. stored at k - 1.
struct Example1Sequence {
  std::vector<std::int64_t> a;
  std::vector<int> delta;     // 1 at k = 2^p, p >= 2
  std::vector<std::int64_t> h;  // a_{k+1} - a_k - delta_k
};

Example1Sequence example1_sequence(int k_max);

struct Example2Sequence {
  std::vector<std::int64_t> a;
  std::vector<cplx> a_tilde;  // sqrt(a^2 - beta^2) + i beta, |a_tilde| = a
  std::vector<double> alpha;
  std::vector<double> beta;   // (a_k - a_{k-1}) / 10, a_0 = 0
  std::vector<std::int64_t> h;
};

Example2Sequence example2_sequence(int k_max);

enum class ProductKind { Example1, Example2 };

struct ProductZero {
  cplx location;  // representative with Re > 0; -location is a zero too
  int multiplicity = 0;
  int k = 0;
};

/// Truncated canonical product
///   mu^[leading_mu] * prod_{drop_prefix < k <= k_max} (1 - mu^2/z_k^2)^{h_k}
/// with z_k = a_k (Example1) or the split a_tilde_k, conj(a_tilde_k), a_k
/// carrying [h/2], [h/2], h - 2[h/2] (Example2).
struct ProductSpec {
  ProductKind kind = ProductKind::Example1;
  int k_max = 64;
  int drop_prefix = 0;
  bool leading_mu = true;
  std::vector<std::int64_t> a;
  std::vector<int> delta;
  std::vector<std::int64_t> h;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<cplx> a_tilde;
  std::vector<ProductZero> zeros;
  double tail_sum = 0.0;  // bound on sum_{k > k_max} h_k / a_k^2
};

ProductSpec make_product_spec(ProductKind kind, int k_max, int drop_prefix = 0,
                              bool leading_mu = true);

struct ProductValue {
  cplx value;
  double tail_bound = 0.0;     // bound on |log of the dropped factors|
  int zero_multiplicity = 0;   // > 0 when mu sits on a zero
};

ProductValue product_eval(const ProductSpec& spec, cplx mu);

struct GrowthBound {
  std::vector<double> ratios;  // |F(x)| / (|x| + 1)^M
  bool bounded = false;
  double c_hat = 0.0;
  int empirical_m = -1;        // smallest M in [0, 64] with a bounded ratio
};

/// Bounded means the largest ratio on the top octave of the grid does not
/// exceed the largest ratio below it.
GrowthBound growth_bound_check(const ProductSpec& spec, const std::vector<double>& x_grid,
                               int m);

struct PwEvidence {
  double odd_defect = 0.0;
  std::vector<double> l2_tail_trend;  // L2 mass over 2^j <= |x| <= 2^{j+1}
  double type_estimate = 0.0;         // max (log|f(iy)| + tail bound) / y
  std::vector<double> type_y;
  std::vector<double> type_ratios;
};

/// Evidence that f lies in a Paley-Wiener space: oddness, decay of dyadic L2
/// bands up to R, and the growth rate along the imaginary axis for
/// y in [y_min, half_strip]. On the real axis the dropped factors have
/// modulus below one, so truncation can only inflate the bands; on the
/// imaginary axis the tail bound is added to keep the type ratio an upper
/// estimate.
PwEvidence pw_membership_check(const ProductSpec& spec, double R, double half_strip,
                               double y_min = 5.0);

struct NonclassicalReport {
  SpectrumReport spectrum;
  MultiplicityGrowth growth;
  std::vector<double> ratio_min_per_block;  // min of m / ln a_k per dyadic block
  std::vector<double> ratio_max_per_block;
  std::vector<double> im_growth;            // |Im z| per zero, Example2
  std::vector<int> winding_checked;         // k values cross-checked by winding
};

/// Records for the zeros of the product (mu-plane, Re mu > 0) with winding
/// cross-checks; a mismatch raises InternalConsistency.
NonclassicalReport nonclassical_spectrum_report(const ProductSpec& spec);

}  // namespace slspec
