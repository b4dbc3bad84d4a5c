#include "slspec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "slspec/bc.hpp"
#include "slspec/contour.hpp"
#include "slspec/parallel.hpp"
#include "slspec/potential.hpp"

namespace slspec {

namespace {

constexpr double kGolden = 0.6180339887498949;

bool contains_origin(const Rect& b) {
  return b.re0 < 0.0 && b.re1 > 0.0 && b.im0 < 0.0 && b.im1 > 0.0;
}

double frac(double x) { return x - std::floor(x); }

// 2D Halton point in the unit square.
std::pair<double, double> halton(int i) {
  auto radical = [](int n, int base) {
    double f = 1.0, r = 0.0;
    while (n > 0) {
      f /= base;
      r += f * (n % base);
      n /= base;
    }
    return r;
  };
  return {radical(i + 1, 2), radical(i + 1, 3)};
}

struct DegenerateInfo {
  bool degenerate = false;
  bool cauchy = false;
  std::optional<cplx> d;
  bool symmetric = false;
};

DegenerateInfo degenerate_info(const DetEvaluator& ev, double symmetry_tol) {
  DegenerateInfo info;
  const BcClass cls = classify(ev.bc());
  const auto* deg = std::get_if<Degenerate>(&cls.kind);
  if (deg == nullptr) return info;
  info.degenerate = true;
  info.cauchy = deg->variant == DegenerateVariant::CauchyLike;
  if (!info.cauchy) info.d = ev.visual_d() ? *ev.visual_d() : deg->d;
  const Potential& q = ev.potential();
  double qmax = 0.0;
  for (const cplx& v : q.values()) qmax = std::max(qmax, std::abs(v));
  info.symmetric = symmetry_defect(q).norm <= symmetry_tol * (1.0 + kPi * qmax);
  return info;
}

// Magnitude scale of the terms that make up Delta at mu.
double delta_scale(const DetEvaluator& ev, cplx mu) {
  const FundamentalValues f = ev.fundamental(mu);
  if (ev.normalization() == Normalization::DegenerateVisual) {
    const cplx d = *ev.visual_d();
    return 1.0 + std::abs((d * d - 1.0) / d) + std::abs(f.c) + std::abs(f.sp);
  }
  const Minors& m = ev.minors();
  return 1.0 + std::abs(m.a13) + std::abs(m.a24) + std::abs(m.a34 * f.s) +
         std::abs(m.a23 * f.sp) + std::abs(m.a14 * f.c) + std::abs(m.a12 * f.cp);
}

struct Job {
  Rect box;
  int count = 0;
  int depth = 0;
};

struct Outcome {
  std::vector<Job> children;
  std::optional<EigenvalueRecord> record;
  std::vector<std::string> notes;
  bool undetermined = false;
  bool inconsistent = false;
  std::size_t bisections = 0;
};

class Locator {
 public:
  Locator(const DetEvaluator& ev, const SpectrumOptions& opt, int max_refine)
      : ev_(ev), opt_(opt), max_refine_(max_refine) {}

  int count(const Rect& b) const {
    WindingOptions w;
    w.samples = opt_.samples;
    return winding_rect([this](cplx mu) { return ev_.delta(mu); }, b, w).count;
  }

  // Newton in lambda; m is the lambda-multiplicity sought.
  std::optional<cplx> refine(const Rect& box, int m) const {
    const cplx c = box.center();
    cplx lambda = c * c;
    const double reach = 2.0 * std::max(box.diameter(), 1e-6);
    double last = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt_.newton_iterations; ++it) {
      const cplx mu = std::sqrt(lambda);
      cplx g, gp;
      double factor = 1.0;
      if (m <= 3) {
        g = m == 1 ? ev_.delta(mu) : ev_.lambda_derivative(mu, m - 1);
        gp = ev_.lambda_derivative(mu, m);
      } else {
        g = ev_.delta(mu);
        gp = ev_.lambda_derivative(mu, 1);
        factor = m;
      }
      if (g == cplx{}) {
        last = 0.0;
        break;
      }
      if (gp == cplx{} || !std::isfinite(std::abs(gp))) return std::nullopt;
      const cplx step = factor * g / gp;
      lambda -= step;
      last = std::abs(step);
      const cplx now = std::sqrt(lambda);
      if (std::min(std::abs(now - c), std::abs(-now - c)) > reach) return std::nullopt;
      if (last <= 4e-16 * std::max(1.0, std::abs(lambda))) break;
    }
    if (!(last <= 1e-10 * std::max(1.0, std::abs(lambda)))) return std::nullopt;
    const cplx s = std::sqrt(lambda);
    const double pad = 1e-9 * std::max(1.0, box.diameter());
    const Rect grown{box.re0 - pad, box.re1 + pad, box.im0 - pad, box.im1 + pad};
    if (grown.contains(s)) return s;
    if (grown.contains(-s)) return -s;
    return std::nullopt;
  }

  EigenvalueRecord make_record(cplx mu, int m, const Rect& box) const {
    EigenvalueRecord r;
    r.mu = mu;
    r.lambda = mu * mu;
    r.multiplicity = m;
    r.box = box;
    r.residual = std::abs(ev_.delta(mu));
    return r;
  }

  Outcome process(const Job& job) const {
    Outcome out;
    if (job.count == 0) return out;
    const Rect& box = job.box;
    const bool origin = contains_origin(box);
    int m = job.count;
    if (origin) {
      if (job.count % 2 != 0) {
        // an odd count at the origin means another zero shares the box
        m = 0;
      } else {
        m = job.count / 2;
      }
    }
    const double diam = box.diameter();

    if (!origin && job.count == 1 && diam <= opt_.newton_diameter) {
      if (auto mu = refine(box, 1)) {
        out.record = make_record(*mu, 1, box);
        return out;
      }
    }
    if (m > 0 && diam <= opt_.isolation) {
      if (auto mu = refine(box, m)) {
        out.record = make_record(*mu, m, box);
      } else {
        out.record = make_record(box.center(), m, box);
        out.notes.push_back("refinement did not converge near mu = " +
                            std::to_string(box.center().real()) + " " +
                            std::to_string(box.center().imag()) + "i");
      }
      return out;
    }
    if (job.depth >= max_refine_) {
      out.undetermined = true;
      out.record = make_record(box.center(), std::max(1, m), box);
      out.notes.push_back("refinement cap reached with " + std::to_string(job.count) +
                          " zeros unresolved");
      return out;
    }

    const bool split_re = box.width() >= box.height();
    bool mismatch = false;
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double f =
          0.5 + 0.08 * (frac((job.depth + 1) * kGolden + attempt * 0.7071067811865476) - 0.5);
      Rect a = box, b = box;
      if (split_re) {
        const double x = box.re0 + f * box.width();
        a.re1 = x;
        b.re0 = x;
      } else {
        const double y = box.im0 + f * box.height();
        a.im1 = y;
        b.im0 = y;
      }
      int ca = 0, cb = 0;
      try {
        ca = count(a);
        cb = count(b);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::BoundaryZero) continue;
        throw;
      }
      ++out.bisections;
      if (ca + cb != job.count) {
        mismatch = true;
        continue;
      }
      if (mismatch) out.notes.push_back("bisection retried after inconsistent child counts");
      out.children.push_back({a, ca, job.depth + 1});
      out.children.push_back({b, cb, job.depth + 1});
      return out;
    }
    out.undetermined = true;
    out.inconsistent = mismatch;
    out.record = make_record(box.center(), std::max(1, m), box);
    out.notes.push_back("box could not be bisected consistently");
    return out;
  }

  bool verify(EigenvalueRecord& r) const {
    const Rect& b = r.box;
    const cplx mu = r.mu;
    // keep the check box inside the isolating box, centred on the zero
    auto half = [](double lo, double hi, double x, double span) {
      return std::min(0.25 * span, 0.9 * std::min(x - lo, hi - x));
    };
    cplx at = mu;
    if (!b.contains(at)) at = -mu;
    if (!b.contains(at)) return false;
    const double hw = half(b.re0, b.re1, at.real(), b.width());
    const double hh = half(b.im0, b.im1, at.imag(), b.height());
    if (!(hw > 0.0) || !(hh > 0.0)) return false;
    try {
      const int n = count(Rect::around(at, hw, hh));
      const int expect = contains_origin(Rect::around(at, hw, hh)) ? 2 * r.multiplicity
                                                                     : r.multiplicity;
      return n == expect;
    } catch (const Error&) {
      return false;
    }
  }

 private:
  const DetEvaluator& ev_;
  SpectrumOptions opt_;
  int max_refine_;
};

cplx canonical_mu(cplx mu) {
  const double tiny = 1e-13 * std::max(1.0, std::abs(mu));
  if (std::abs(mu.real()) <= tiny) {
    return {0.0, std::abs(mu.imag()) <= tiny ? 0.0 : std::abs(mu.imag())};
  }
  return mu.real() < 0.0 ? -mu : mu;
}

}  // namespace

std::string to_string(SpectrumClass c) {
  switch (c) {
    case SpectrumClass::CountableDiscrete: return "CountableDiscrete";
    case SpectrumClass::Empty: return "Empty";
    case SpectrumClass::WholePlane: return "WholePlane";
    case SpectrumClass::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

std::string to_string(AsymptoticVerdict v) {
  switch (v) {
    case AsymptoticVerdict::AsymptoticallySimple: return "AsymptoticallySimple";
    case AsymptoticVerdict::AsymptoticallyMultiple: return "AsymptoticallyMultiple";
    case AsymptoticVerdict::Mixed: return "Mixed/Undetermined";
  }
  return "Mixed/Undetermined";
}

SpectrumReport locate_spectrum(const DetEvaluator& ev, const Rect& region, int max_refine,
                               const SpectrumOptions& opt) {
  if (region.empty() || !(region.re1 > 0.0)) {
    fail(ErrorCode::InvalidInput, "scan region must be a nonempty rectangle with Re mu > 0");
  }
  if (max_refine < 1) fail(ErrorCode::InvalidInput, "max_refine must be positive");
  if (opt.samples < 64) fail(ErrorCode::InvalidInput, "winding needs at least 64 samples");

  SpectrumReport report;
  report.scan_region = region;
  Rect base = region;
  if (base.re0 <= 0.0) base.re0 = 0.0;
  const bool touches_axis = base.re0 == 0.0;

  const DegenerateInfo info = degenerate_info(ev, opt.symmetry_tol);

  // identically vanishing determinant
  bool all_zero = true;
  for (int i = 0; i < opt.probes && all_zero; ++i) {
    const auto [u, v] = halton(i);
    const cplx mu{base.re0 + u * base.width(), base.im0 + v * base.height()};
    if (std::abs(ev.delta(mu)) > opt.zero_tol * delta_scale(ev, mu)) all_zero = false;
  }
  if (all_zero) {
    const bool stone = info.degenerate && info.symmetric && info.d &&
                       (std::abs(*info.d - 1.0) <= 1e-10 || std::abs(*info.d + 1.0) <= 1e-10);
    if (stone) {
      report.classification = SpectrumClass::WholePlane;
      report.notes.push_back("Delta vanishes identically: every lambda is an eigenvalue");
    } else {
      report.classification = SpectrumClass::Undetermined;
      report.notes.push_back(
          "Delta vanished on every probe but the degenerate symmetric d = +-1 test failed");
    }
    return report;
  }

  const Locator loc(ev, opt, max_refine);

  // jitter the region outward so that lattice-aligned zeros stay off it
  Rect root;
  int root_count = -1;
  for (int attempt = 0; attempt < 6 && root_count < 0; ++attempt) {
    const double j = opt.jitter * std::pow(1.0 + kGolden, attempt);
    root = base;
    root.re0 = touches_axis ? -j * 0.5773502691896258 : base.re0 - j * 0.7071067811865476;
    root.re1 = base.re1 + j * 0.4472135954999579;
    root.im0 = base.im0 - j * 0.3779644730092272;
    root.im1 = base.im1 + j * 0.3015113445777636;
    try {
      root_count = loc.count(root);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BoundaryZero) throw;
    }
  }
  if (root_count < 0) {
    report.classification = SpectrumClass::Undetermined;
    report.notes.push_back("zeros on the scan-region boundary could not be avoided");
    return report;
  }

  std::vector<Job> frontier{{root, root_count, 0}};
  std::vector<EigenvalueRecord> found;
  bool undetermined = false;
  std::size_t processed = 0;
  while (!frontier.empty()) {
    std::vector<Outcome> outcomes(frontier.size());
    parallel_for(frontier.size(),
                 [&](std::size_t i) { outcomes[i] = loc.process(frontier[i]); });
    processed += frontier.size();
    std::vector<Job> next;
    for (auto& o : outcomes) {
      report.bisections += o.bisections;
      if (o.inconsistent) report.winding_consistent = false;
      if (o.undetermined) undetermined = true;
      for (auto& n : o.notes) report.notes.push_back(std::move(n));
      if (o.record) found.push_back(*o.record);
      for (auto& c : o.children) {
        if (c.count > 0) next.push_back(c);
      }
    }
    if (processed + next.size() > opt.max_boxes) {
      undetermined = true;
      report.notes.push_back("box budget exhausted");
      for (const Job& j : next) {
        found.push_back(loc.make_record(j.box.center(), std::max(1, j.count), j.box));
      }
      break;
    }
    frontier = std::move(next);
  }

  // mirror pairs +-mu on the imaginary axis share one lambda
  for (auto& r : found) {
    r.mu = canonical_mu(r.mu);
    r.lambda = r.mu * r.mu;
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  std::vector<EigenvalueRecord> unique;
  for (auto& r : found) {
    bool merged = false;
    for (auto& u : unique) {
      if (std::abs(u.lambda - r.lambda) <= 1e-7 * (1.0 + std::abs(r.lambda))) {
        if (u.multiplicity != r.multiplicity) {
          report.notes.push_back("mirror zeros disagree on multiplicity");
          u.multiplicity = std::max(u.multiplicity, r.multiplicity);
        }
        merged = true;
        break;
      }
    }
    if (!merged) unique.push_back(r);
  }

  parallel_for(unique.size(), [&](std::size_t i) { unique[i].verified = loc.verify(unique[i]); });
  for (const auto& r : unique) {
    if (!r.verified) {
      report.notes.push_back("half-size box did not reproduce the multiplicity at mu = " +
                             std::to_string(r.mu.real()) + " " +
                             std::to_string(r.mu.imag()) + "i");
    }
    report.max_multiplicity = std::max(report.max_multiplicity, r.multiplicity);
  }

  std::sort(unique.begin(), unique.end(), [](const auto& a, const auto& b) {
    const double ma = std::abs(a.mu), mb = std::abs(b.mu);
    if (ma != mb) return ma < mb;
    return std::arg(a.mu) < std::arg(b.mu);
  });
  report.records = std::move(unique);

  if (!report.winding_consistent) {
    report.notes.push_back("child winding counts did not sum to the parent count");
  }
  if (undetermined) {
    report.classification = SpectrumClass::Undetermined;
  } else if (report.records.empty() && info.degenerate && (info.cauchy || info.symmetric)) {
    report.classification = SpectrumClass::Empty;
  } else {
    report.classification = SpectrumClass::CountableDiscrete;
  }
  return report;
}

AsymptoticFit asymptotic_fit(const SpectrumReport& report, int theta, double pair_tol) {
  if (theta != 0 && theta != 1) fail(ErrorCode::InvalidInput, "theta must be 0 or 1");
  std::map<int, std::vector<cplx>> buckets;
  AsymptoticFit fit;
  for (const auto& r : report.records) {
    int n = static_cast<int>(std::lround((r.mu.real() + theta) / 2.0));
    if (theta == 1) n = std::max(n, 1);
    n = std::max(n, 0);
    for (int k = 0; k < r.multiplicity; ++k) buckets[n].push_back(r.mu);
  }
  for (auto& [n, mus] : buckets) {
    if (n == 0) {
      if (mus.size() > 1) {
        fail(ErrorCode::AssignmentFailure, "more than one zero assigned to index 0");
      }
      fit.lambda0_mu = mus.front();
      continue;
    }
    if (mus.size() > 2) {
      fail(ErrorCode::AssignmentFailure,
           "more than two zeros assigned to index " + std::to_string(n));
    }
    AssignedPair p;
    p.n = n;
    p.mu = mus;
    const double target = 2.0 * n - theta;
    for (const cplx& mu : mus) {
      fit.sup_defect = std::max(fit.sup_defect, std::abs(mu - target) * std::sqrt(double(n)));
    }
    if (mus.size() == 2) {
      p.coincide = std::abs(mus[0] - mus[1]) <= pair_tol * (1.0 + std::abs(mus[0]));
      ++fit.complete_pairs;
    }
    fit.pairs.push_back(p);
  }
  if (fit.complete_pairs < 8) {
    fail(ErrorCode::InvalidInput, "asymptotic fit needs at least 8 located pairs, found " +
                                      std::to_string(fit.complete_pairs));
  }
  std::vector<const AssignedPair*> complete;
  for (const auto& p : fit.pairs) {
    if (p.mu.size() == 2) complete.push_back(&p);
  }
  const std::size_t start = complete.size() / 2;
  std::size_t same = 0;
  for (std::size_t i = start; i < complete.size(); ++i) same += complete[i]->coincide ? 1 : 0;
  const std::size_t tail = complete.size() - start;
  if (same == tail) {
    fit.verdict = AsymptoticVerdict::AsymptoticallyMultiple;
  } else if (same == 0) {
    fit.verdict = AsymptoticVerdict::AsymptoticallySimple;
  } else {
    fit.verdict = AsymptoticVerdict::Mixed;
  }
  return fit;
}

SeparationCheck separation_check(const SpectrumReport& report, double floor) {
  if (report.records.size() < 2) {
    fail(ErrorCode::InvalidInput, "separation check needs at least two eigenvalues");
  }
  double top = 0.0;
  for (const auto& r : report.records) top = std::max(top, std::abs(r.mu));
  std::vector<const EigenvalueRecord*> window;
  for (const auto& r : report.records) {
    if (std::abs(r.mu) >= 0.5 * top) window.push_back(&r);
  }
  SeparationCheck out;
  for (const auto* r : window) {
    if (r->multiplicity > 1) {
      out.c0_hat = 0.0;
      out.note = "coincident eigenvalues: multiple zeros in the upper half of the scan";
      out.holds_trend = false;
      return out;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < window.size(); ++i) {
    for (std::size_t j = i + 1; j < window.size(); ++j) {
      best = std::min(best, std::abs(window[i]->mu - window[j]->mu));
    }
  }
  if (!std::isfinite(best)) {
    fail(ErrorCode::InvalidInput, "upper half of the scan holds fewer than two eigenvalues");
  }
  out.c0_hat = best;
  out.holds_trend = best > floor;
  return out;
}

MultiplicityGrowth multiplicity_growth_check(std::span<const EigenvalueRecord> records) {
  MultiplicityGrowth g;
  std::vector<const EigenvalueRecord*> use;
  for (const auto& r : records) {
    if (std::abs(r.mu) > 1.0) use.push_back(&r);
  }
  if (use.empty()) {
    fail(ErrorCode::InvalidInput, "multiplicity growth needs eigenvalues with |mu| > 1");
  }
  std::stable_sort(use.begin(), use.end(), [](auto* a, auto* b) {
    return std::abs(a->mu) < std::abs(b->mu);
  });
  g.c1_hat = std::numeric_limits<double>::infinity();
  for (const auto* r : use) {
    const double a = std::abs(r->mu);
    const double ratio = r->multiplicity / std::log(a);
    g.mu_abs.push_back(a);
    g.ratios.push_back(ratio);
    g.c1_hat = std::min(g.c1_hat, ratio);
    g.c2_hat = std::max(g.c2_hat, ratio);
  }
  return g;
}

MultiplicityGrowth multiplicity_growth_check(const SpectrumReport& report) {
  return multiplicity_growth_check(std::span<const EigenvalueRecord>(report.records));
}

SqrtRatio multiplicity_sqrt_ratio(std::span<const EigenvalueRecord> records) {
  SqrtRatio out;
  std::vector<const EigenvalueRecord*> use;
  for (const auto& r : records) {
    if (std::abs(r.mu) > 0.0) use.push_back(&r);
  }
  if (use.empty()) fail(ErrorCode::InvalidInput, "no nonzero eigenvalues");
  std::stable_sort(use.begin(), use.end(), [](auto* a, auto* b) {
    return std::abs(a->mu) < std::abs(b->mu);
  });
  std::map<int, double> octave_max;
  for (const auto* r : use) {
    const double a = std::abs(r->mu);
    const double ratio = r->multiplicity / std::sqrt(a);
    out.mu_abs.push_back(a);
    out.ratios.push_back(ratio);
    const int oct = static_cast<int>(std::floor(std::log2(a)));
    auto [it, fresh] = octave_max.emplace(oct, ratio);
    if (!fresh) it->second = std::max(it->second, ratio);
  }
  // the ratio may rise over the first octaves; judge the upper half only
  std::vector<double> maxima;
  for (const auto& [oct, mx] : octave_max) maxima.push_back(mx);
  const std::size_t start = maxima.size() / 2;
  out.tends_to_zero_trend = maxima.size() - start >= 2;
  for (std::size_t i = start + 1; i < maxima.size(); ++i) {
    if (!(maxima[i] < maxima[i - 1])) out.tends_to_zero_trend = false;
  }
  if (out.tends_to_zero_trend && !(maxima.back() <= 0.9 * maxima[start])) {
    out.tends_to_zero_trend = false;
  }
  return out;
}

SqrtRatio multiplicity_sqrt_ratio(const SpectrumReport& report) {
  return multiplicity_sqrt_ratio(std::span<const EigenvalueRecord>(report.records));
}

}  // namespace slspec
