#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "slspec/common.hpp"

namespace slspec {

enum class GridKind { Uniform, Explicit };

/// Symbolic description attached to a sampled potential. When present it
/// takes precedence over the samples for point evaluation.
struct ClosedForm {
  enum class Kind { None, Zero, Polynomial, Tabulated };
  Kind kind = Kind::None;
  std::vector<cplx> poly;  // coefficients c0 + c1 x + ... for Polynomial
};

struct EndpointDerivative {
  int order = 0;
  cplx at_zero;
  cplx at_pi;
};

/// Complex coefficient q(x) on [0, pi].
///
/// Samples live on a strictly increasing grid from 0 to pi with at least 16
/// nodes. Point evaluation uses the closed form when one is attached and a
/// monotone (Fritsch-Carlson) cubic of the samples otherwise.
class Potential {
 public:
  static constexpr std::size_t kMinSamples = 16;

  Potential(std::vector<double> grid, std::vector<cplx> values,
            ClosedForm closed_form = {},
            std::vector<EndpointDerivative> endpoint_derivs = {});

  static Potential zero(std::size_t samples = 65);
  static Potential constant(cplx value, std::size_t samples = 65);
  static Potential polynomial(std::vector<cplx> coeffs,
                              std::size_t samples = 257);
  static Potential sampled(const std::function<cplx(double)>& f,
                           std::size_t samples = 257);

  std::span<const double> grid() const { return grid_; }
  std::span<const cplx> values() const { return values_; }
  GridKind grid_kind() const { return grid_kind_; }
  const ClosedForm& closed_form() const { return closed_form_; }
  std::span<const EndpointDerivative> endpoint_derivs() const {
    return endpoint_derivs_;
  }

  bool is_zero() const { return closed_form_.kind == ClosedForm::Kind::Zero; }
  bool has_analytic_form() const;
  /// Value when q is known to be constant (zero or a degree-0 polynomial).
  std::optional<cplx> constant_value() const;
  /// True if the grid satisfies x_i + x_{n-1-i} = pi to rounding.
  bool symmetric_grid() const { return symmetric_grid_; }

  cplx operator()(double x) const;
  /// Piecewise-linear interpolant of the samples (closed form if present).
  cplx linear(double x) const;

  /// Interior grid nodes where the interpolant may lose smoothness. Empty
  /// for analytic potentials.
  std::vector<double> breakpoints() const;

  Potential conjugated() const;
  /// q(pi - x); reuses the grid when it is symmetric.
  Potential reflected() const;
  Potential scaled(cplx factor) const;

 private:
  std::size_t locate(double x) const;
  cplx poly_eval(double x, int derivative) const;

  std::vector<double> grid_;
  std::vector<cplx> values_;
  std::vector<cplx> slopes_;  // monotone cubic node slopes
  GridKind grid_kind_ = GridKind::Explicit;
  bool symmetric_grid_ = false;
  ClosedForm closed_form_;
  std::vector<EndpointDerivative> endpoint_derivs_;

  friend cplx derivative_at(const Potential& q, double x, int k);
};

/// Analytic k-th derivative for closed-form potentials.
cplx derivative_at(const Potential& q, double x, int k);

struct SymmetryDefect {
  double norm = 0.0;  // L1 norm of Q(x) = q(x) - q(pi - x)
  std::vector<double> x;
  std::vector<cplx> q_defect;
};

SymmetryDefect symmetry_defect(const Potential& q);

/// Evaluates Q(x) = q(x) - q(pi - x), exactly zero for mirror-symmetric
/// samples on a symmetric grid.
cplx reflection_defect(const Potential& q, double x);

struct EndpointTest {
  bool holds = false;  // q^(k)(0) != (-1)^k q^(k)(pi)
  cplx lhs;
  cplx rhs;
};

EndpointTest endpoint_derivative_test(const Potential& q, int k,
                                      double tol = 1e-8);

struct EndpointLimit {
  std::vector<cplx> estimates;
  bool converged = false;
  cplx nu;
};

/// Ratios of the integral of Q over [pi - h, pi] to h^rho along a decreasing
/// sequence of h.
EndpointLimit endpoint_defect_limit(const Potential& q, double rho,
                                    std::span<const double> h_grid,
                                    double tol = 1e-8);

}  // namespace slspec
