#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slspec/chardet.hpp"
#include "slspec/common.hpp"

namespace slspec {

struct EigenvalueRecord {
  cplx mu;              // Re mu >= 0
  cplx lambda;          // mu^2
  int multiplicity = 1; // algebraic, in lambda
  Rect box;             // isolating rectangle in the mu-plane
  double residual = 0.0;
  std::optional<std::pair<int, int>> index_hint;
  bool verified = false;  // half-size box reproduces the multiplicity
};

enum class SpectrumClass { CountableDiscrete, Empty, WholePlane, Undetermined };

std::string to_string(SpectrumClass c);

struct SpectrumReport {
  std::vector<EigenvalueRecord> records;
  Rect scan_region;
  SpectrumClass classification = SpectrumClass::CountableDiscrete;
  std::vector<std::string> notes;
  std::size_t bisections = 0;
  /// Every bisection had child counts summing to the parent count.
  bool winding_consistent = true;
  int max_multiplicity = 0;
};

struct SpectrumOptions {
  int samples = 64;             // initial contour samples per box
  double isolation = 1e-3;      // diameter at which multiple zeros are recorded
  double newton_diameter = 1.0; // single-zero boxes at most this wide go to Newton
  double jitter = 1e-3;         // outward edge offsets, times 1/sqrt(p)
  int newton_iterations = 60;
  int probes = 40;              // scattered points for the identically-zero test
  double zero_tol = 1e-8;       // relative |Delta| bound on the probes
  double symmetry_tol = 1e-10;
  std::size_t max_boxes = 200000;
};

/// Finds all zeros of Delta in region (mu-plane, clipped to Re mu >= 0).
SpectrumReport locate_spectrum(const DetEvaluator& ev, const Rect& region,
                               int max_refine = 40, const SpectrumOptions& opt = {});

enum class AsymptoticVerdict { AsymptoticallySimple, AsymptoticallyMultiple, Mixed };

std::string to_string(AsymptoticVerdict v);

struct AssignedPair {
  int n = 0;
  std::vector<cplx> mu;  // one or two members
  bool coincide = false;
};

struct AsymptoticFit {
  std::vector<AssignedPair> pairs;  // index n >= 1, sorted
  std::optional<cplx> lambda0_mu;   // theta = 0 zero assigned to n = 0
  double sup_defect = 0.0;          // max |mu - (2n - theta)| sqrt(n)
  AsymptoticVerdict verdict = AsymptoticVerdict::Mixed;
  std::size_t complete_pairs = 0;
};

/// Assigns located zeros to the series 2n - theta. Verdicts are evidence
/// from the scanned window only.
AsymptoticFit asymptotic_fit(const SpectrumReport& report, int theta,
                             double pair_tol = 1e-6);

struct SeparationCheck {
  double c0_hat = 0.0;
  bool holds_trend = false;
  std::string note;
};

SeparationCheck separation_check(const SpectrumReport& report, double floor = 1e-3);

struct MultiplicityGrowth {
  std::vector<double> mu_abs;
  std::vector<double> ratios;  // m / ln|mu|
  double c1_hat = 0.0;
  double c2_hat = 0.0;
};

MultiplicityGrowth multiplicity_growth_check(std::span<const EigenvalueRecord> records);
MultiplicityGrowth multiplicity_growth_check(const SpectrumReport& report);

struct SqrtRatio {
  std::vector<double> mu_abs;
  std::vector<double> ratios;  // m / sqrt|mu|
  bool tends_to_zero_trend = false;
};

/// m / sqrt|mu| with a trend flag: over the upper half of the octaves of
/// |mu| the per-octave maxima decrease strictly and lose at least 10%.
SqrtRatio multiplicity_sqrt_ratio(std::span<const EigenvalueRecord> records);
SqrtRatio multiplicity_sqrt_ratio(const SpectrumReport& report);

}  // namespace slspec
