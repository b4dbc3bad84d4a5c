#include "slspec/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slspec/chardet.hpp"

namespace slspec {

namespace {

class Tracker {
 public:
  Tracker(const ComplexFn& f, const std::function<cplx(double)>& path,
          const WindingOptions& opt)
      : f_(f), path_(path), opt_(opt) {}

  cplx eval(double t) {
    if (++result_.evaluations > opt_.max_evaluations) {
      fail(ErrorCode::NumericalFailure, "winding evaluation budget exhausted");
    }
    const cplx z = path_(t);
    const cplx v = f_(z);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      fail(ErrorCode::NumericalFailure, "non-finite function value on contour");
    }
    const double a = std::abs(v);
    if (a == 0.0 || a < opt_.abs_floor) {
      fail(ErrorCode::BoundaryZero, "function vanishes on the contour near " +
                                        std::to_string(z.real()) + std::string(" ") +
                                        std::to_string(z.imag()) + "i");
    }
    result_.min_abs = std::min(result_.min_abs, a);
    result_.max_abs = std::max(result_.max_abs, a);
    return v;
  }

  // A segment is accepted once its midpoint confirms the phase step, |f|
  // shows no dip and the quadratic through the three samples has no root
  // close to the segment. A zero of even order next to the segment would
  // otherwise leave the end-point phases nearly unchanged.
  double segment(double ta, cplx fa, double tb, cplx fb, int depth) {
    const double d = std::arg(fb / fa);
    const double tm = 0.5 * (ta + tb);
    if (std::abs(d) < 0.5 * kPi) {
      const cplx fm = eval(tm);
      const double d1 = std::arg(fm / fa);
      const double d2 = std::arg(fb / fm);
      const bool smooth = std::abs(d1) < 0.25 * kPi && std::abs(d2) < 0.25 * kPi &&
                          std::abs(d1 + d2 - d) < 1e-9 &&
                          std::abs(fm) >= 0.5 * std::min(std::abs(fa), std::abs(fb)) &&
                          !model_root_nearby(fa, fm, fb);
      if (smooth) return d;
      if (depth >= opt_.max_depth) {
        fail(ErrorCode::BoundaryZero, "zero on or near the contour");
      }
      return segment(ta, fa, tm, fm, depth + 1) + segment(tm, fm, tb, fb, depth + 1);
    }
    if (depth >= opt_.max_depth) {
      fail(ErrorCode::BoundaryZero,
           "phase jump could not be resolved: zero on or near the contour");
    }
    const cplx fm = eval(tm);
    return segment(ta, fa, tm, fm, depth + 1) + segment(tm, fm, tb, fb, depth + 1);
  }

  // Roots of the interpolating quadratic p(0) = fa, p(1/2) = fm, p(1) = fb
  // within 0.3 segment lengths of [0, 1].
  static bool model_root_nearby(cplx fa, cplx fm, cplx fb) {
    const cplx c = 2.0 * (fa - 2.0 * fm + fb);
    const cplx b = fb - fa - c;
    auto near_segment = [](cplx r) {
      if (r.real() >= 0.0 && r.real() <= 1.0) return std::abs(r.imag()) < 0.3;
      return std::min(std::abs(r), std::abs(r - 1.0)) < 0.3;
    };
    const double scale = std::abs(fa) + std::abs(fm) + std::abs(fb);
    if (std::abs(c) <= 1e-14 * scale) {
      return std::abs(b) > 0.0 && near_segment(-fa / b);
    }
    const cplx disc = std::sqrt(b * b - 4.0 * c * fa);
    const cplx q = -0.5 * (std::real(std::conj(b) * disc) >= 0.0 ? b + disc : b - disc);
    if (q == cplx{}) return true;
    return near_segment(q / c) || near_segment(fa / q);
  }

  Winding run(int samples) {
    result_.min_abs = std::numeric_limits<double>::infinity();
    result_.max_abs = 0.0;
    const cplx f0 = eval(0.0);
    cplx prev = f0;
    double total = 0.0;
    for (int i = 1; i <= samples; ++i) {
      const double ta = static_cast<double>(i - 1) / samples;
      const double tb = static_cast<double>(i) / samples;
      const cplx fb = i == samples ? f0 : eval(tb);
      total += segment(ta, prev, tb, fb, 0);
      prev = fb;
    }
    if (result_.min_abs < opt_.rel_floor * result_.max_abs) {
      fail(ErrorCode::BoundaryZero, "|f| on the contour is below the relative floor");
    }
    const double turns = total / (2.0 * kPi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 1e-3) {
      fail(ErrorCode::NumericalFailure, "non-integer winding number");
    }
    result_.count = static_cast<int>(rounded);
    return result_;
  }

 private:
  const ComplexFn& f_;
  const std::function<cplx(double)>& path_;
  WindingOptions opt_;
  Winding result_;
};

}  // namespace

Winding winding_path(const ComplexFn& f, const std::function<cplx(double)>& path,
                     const WindingOptions& opt) {
  if (opt.samples < 4) fail(ErrorCode::InvalidInput, "winding needs at least 4 samples");
  Tracker t(f, path, opt);
  return t.run(opt.samples);
}

Winding winding_rect(const ComplexFn& f, const Rect& box, const WindingOptions& opt) {
  if (box.empty()) fail(ErrorCode::InvalidInput, "empty winding rectangle");
  const cplx c[4] = {{box.re0, box.im0}, {box.re1, box.im0}, {box.re1, box.im1},
                     {box.re0, box.im1}};
  // four edges traversed at unit speed in t, each owning a quarter
  std::function<cplx(double)> path = [&](double t) {
    const double s = std::clamp(t, 0.0, 1.0) * 4.0;
    const int e = std::min(3, static_cast<int>(s));
    const double u = s - e;
    return c[e] + u * (c[(e + 1) % 4] - c[e]);
  };
  return winding_path(f, path, opt);
}

Winding winding_circle(const ComplexFn& f, cplx center, double radius,
                       const WindingOptions& opt) {
  if (!(radius > 0.0)) fail(ErrorCode::InvalidInput, "circle radius must be positive");
  std::function<cplx(double)> path = [&](double t) {
    return center + radius * std::polar(1.0, 2.0 * kPi * t);
  };
  return winding_path(f, path, opt);
}

int winding_count(const DetEvaluator& ev, const Rect& box, int samples) {
  if (samples < 64) fail(ErrorCode::InvalidInput, "winding_count needs samples >= 64");
  WindingOptions o;
  o.samples = samples;
  return winding_rect([&ev](cplx mu) { return ev.delta(mu); }, box, o).count;
}

}  // namespace slspec
