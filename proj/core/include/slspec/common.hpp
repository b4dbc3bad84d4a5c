#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace slspec {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

enum class ErrorCode {
  InvalidInput,
  Unsupported,
  DegenerateMatrix,
  IntegrationFailure,
  BoundaryZero,
  NumericalFailure,
  NotAnEigenvalue,
  InsufficientTruncation,
  AssignmentFailure,
  InternalConsistency,
};

const char* to_string(ErrorCode code);

/// Base exception for every failure reported by the library. The code is
/// the machine-readable payload the CLI forwards in its "error" field.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when the adaptive integrator cannot make progress.
class IntegrationError : public Error {
 public:
  IntegrationError(double reached_x, const std::string& what)
      : Error(ErrorCode::IntegrationFailure, what), reached_x_(reached_x) {}

  double reached_x() const noexcept { return reached_x_; }

 private:
  double reached_x_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

/// Axis-aligned rectangle in the complex plane.
struct Rect {
  double re0 = 0.0;
  double re1 = 0.0;
  double im0 = 0.0;
  double im1 = 0.0;

  double width() const { return re1 - re0; }
  double height() const { return im1 - im0; }
  double diameter() const;
  cplx center() const { return {0.5 * (re0 + re1), 0.5 * (im0 + im1)}; }
  bool contains(cplx z) const {
    return z.real() >= re0 && z.real() <= re1 && z.imag() >= im0 &&
           z.imag() <= im1;
  }
  bool empty() const { return !(re1 > re0) || !(im1 > im0); }

  static Rect around(cplx c, double half_width, double half_height) {
    return {c.real() - half_width, c.real() + half_width,
            c.imag() - half_height, c.imag() + half_height};
  }
};

/// Relative closeness test used by the classification and spectral logic.
inline bool near(cplx a, cplx b, double tol, double scale) {
  return std::abs(a - b) <= tol * scale;
}

}  // namespace slspec
