#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "slspec/common.hpp"

namespace slspec {

/// The six 2x2 minors A_ij of the boundary matrix (columns i < j, 1-based).
struct Minors {
  cplx a12, a13, a14, a23, a24, a34;

  double max_abs() const;
  /// |A12 A34 - A13 A24 + A14 A23| relative to the squared largest minor.
  double plucker_residual() const;
  Minors scaled(cplx factor) const;
};

/// Two boundary forms B_i(u) = a_i1 u'(0) + a_i2 u'(pi) + a_i3 u(0) + a_i4 u(pi).
class BcMatrix {
 public:
  using Row = std::array<cplx, 4>;

  BcMatrix(const Row& first, const Row& second, double tol = 1e-13);

  static BcMatrix dirichlet();
  static BcMatrix neumann();
  static BcMatrix periodic();
  static BcMatrix antiperiodic();
  /// u'(0) + d u'(pi) = 0, u(0) - d u(pi) = 0
  static BcMatrix degenerate(cplx d);

  cplx operator()(int row, int col) const { return rows_[row][col]; }
  const Row& row(int i) const { return rows_[i]; }

  Minors minors() const;
  /// Value of B_row on boundary data (u'(0), u'(pi), u(0), u(pi)).
  cplx apply(int row, cplx up0, cplx uppi, cplx u0, cplx upi) const;

  /// M * A for a 2x2 matrix M.
  BcMatrix left_multiply(const std::array<std::array<cplx, 2>, 2>& m) const;
  /// Each row scaled to unit Euclidean norm.
  BcMatrix row_normalized() const;
  /// Reduced row echelon form with unit pivots.
  BcMatrix rref() const;

 private:
  Minors minors_unchecked() const;

  std::array<Row, 2> rows_;
};

/// Computes the six minors; throws DegenerateMatrix when every minor falls
/// below tol relative to the largest entry squared.
Minors minors(const BcMatrix& a, double tol = 1e-13);

enum class RegularSubtype { I, II, III };
enum class DegenerateVariant { CauchyLike, VisualForm };

struct StrengthenedRegular {
  int group = 1;  // which of the three defining condition groups holds
};

struct RegularNotStrengthened {
  int theta = 0;
  RegularSubtype subtype = RegularSubtype::I;
};

struct Irregular {
  int variant = 1;  // canonical matrix 1, 2 or 3
};

struct Degenerate {
  DegenerateVariant variant = DegenerateVariant::VisualForm;
  cplx d;  // zero for CauchyLike
};

using BcKind = std::variant<StrengthenedRegular, RegularNotStrengthened,
                            Irregular, Degenerate>;

/// Parameters of the canonical matrix read off from the minors.
struct CanonicalParameters {
  std::optional<int> theta;
  std::optional<cplx> a14;
  std::optional<cplx> b0;
  std::optional<cplx> b1;
  std::optional<cplx> a0;
  std::optional<cplx> d;
};

struct BcClass {
  BcKind kind;
  CanonicalParameters params;
  BcMatrix canonical;
  Minors minors;

  bool is_degenerate() const { return std::holds_alternative<Degenerate>(kind); }
};

std::string kind_name(const BcKind& kind);
std::string subtype_name(RegularSubtype s);

/// Places A in the boundary-condition taxonomy. All equalities are tested
/// against tol times the largest minor magnitude.
BcClass classify(const BcMatrix& a, double tol = 1e-10);

BcMatrix canonical_form(const BcMatrix& a, double tol = 1e-10);

/// Minors of b equal a common factor times minors of a (row-equivalence).
bool row_equivalent(const BcMatrix& a, const BcMatrix& b, double tol = 1e-10);

}  // namespace slspec
