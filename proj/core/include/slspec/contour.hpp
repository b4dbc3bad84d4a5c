#pragma once

#include <functional>

#include "slspec/common.hpp"

namespace slspec {

class DetEvaluator;

using ComplexFn = std::function<cplx(cplx)>;

struct WindingOptions {
  int samples = 64;          // initial points on the closed path
  int max_depth = 32;        // bisections allowed on one path segment
  double rel_floor = 1e-13;  // |f| below rel_floor * max|f| flags a boundary zero
  double abs_floor = 0.0;
  std::size_t max_evaluations = 1'000'000;
};

struct Winding {
  int count = 0;
  double min_abs = 0.0;
  double max_abs = 0.0;
  std::size_t evaluations = 0;
};

/// Argument principle along a closed path z(t), t in [0, 1]. Segments are
/// bisected until every phase step is below pi/2. Throws BoundaryZero when
/// a segment cannot be resolved or |f| drops below the floors.
Winding winding_path(const ComplexFn& f, const std::function<cplx(double)>& path,
                     const WindingOptions& opt = {});

/// Counterclockwise boundary of the rectangle.
Winding winding_rect(const ComplexFn& f, const Rect& box, const WindingOptions& opt = {});

Winding winding_circle(const ComplexFn& f, cplx center, double radius,
                       const WindingOptions& opt = {});

/// Zeros of Delta (in mu, with multiplicity) inside the box.
int winding_count(const DetEvaluator& ev, const Rect& box, int samples = 64);

}  // namespace slspec
