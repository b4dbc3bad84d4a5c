#include "slspec/common.hpp"

#include <cmath>

namespace slspec {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::Unsupported: return "unsupported-query";
    case ErrorCode::DegenerateMatrix: return "degenerate-matrix";
    case ErrorCode::IntegrationFailure: return "integration-failure";
    case ErrorCode::BoundaryZero: return "boundary-zero";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::NotAnEigenvalue: return "not-an-eigenvalue";
    case ErrorCode::InsufficientTruncation: return "insufficient-truncation";
    case ErrorCode::AssignmentFailure: return "assignment-failure";
    case ErrorCode::InternalConsistency: return "internal-consistency";
  }
  return "unknown";
}

double Rect::diameter() const { return std::hypot(width(), height()); }

}  // namespace slspec
