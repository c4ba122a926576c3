#pragma once

#include <span>
#include <string>
#include <vector>

#include "halfline/types.hpp"

namespace halfline {

/// Which of the equivalent boundary-condition formulations a pair came from.
///
///  kostrykin_ab:   A1 psi(0) + B1 psi'(0) = 0, stored after mapping to (A,B)
///  harmer_unitary: A = (U+I)/2, B = i(U-I)/2
///  general_ab:     -B^dag psi(0) + A^dag psi'(0) = 0 with A^dag B selfadjoint
///  normalized:     general_ab with A^dag A + B^dag B = I
enum class Formulation { kostrykin_ab, harmer_unitary, general_ab, normalized };

enum class UnitaryConvention { harmer, cosine_sine };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& s);
std::string to_string(UnitaryConvention c);
UnitaryConvention convention_from_string(const std::string& s);

/// Relative tolerance for the selfadjointness and unitarity checks.
inline constexpr double kCheckTolerance = 1e-10;
/// Positive-definiteness threshold, relative to ||A^dag A + B^dag B||.
inline constexpr double kPosDefTolerance = 1e-10;
/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-10;
/// Largest accepted condition number for a gauge matrix.
inline constexpr double kGaugeConditionCap = 1e12;

struct Violation {
  std::string rule;  // e.g. "selfadjoint", "positive_definite", "rank"
  double residual;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks A^dag B = B^dag A and A^dag A + B^dag B > 0.
/// Throws ValidationError on a dimension mismatch.
ValidationReport validate_ab(const Matrix& a, const Matrix& b);

/// Checks A1 B1^dag = B1 A1^dag and rank [A1 B1] = n.
ValidationReport validate_kostrykin(const Matrix& a1, const Matrix& b1);

/// A validated boundary pair (A, B) with its normalization matrix
/// E = (A^dag A + B^dag B)^{1/2}. Immutable once built.
class BoundaryCondition {
 public:
  /// Validates and throws ValidationError listing every violated rule.
  static BoundaryCondition from_ab(Matrix a, Matrix b,
                                   Formulation formulation = Formulation::general_ab);

  /// Formulation (a): maps to A = B1^dag, B = -A1^dag.
  static BoundaryCondition from_kostrykin(const Matrix& a1, const Matrix& b1);

  Eigen::Index n() const { return a_.rows(); }
  const Matrix& a() const { return a_; }
  const Matrix& b() const { return b_; }
  const Matrix& e() const { return e_; }
  Formulation formulation() const { return formulation_; }

  /// E^{-2} = (A^dag A + B^dag B)^{-1}.
  Matrix e_inverse_squared() const;

  /// Residuals of A E^-2 A^dag + B E^-2 B^dag = I and B E^-2 A^dag - A E^-2 B^dag = 0.
  double normalization_residual() const;

 private:
  BoundaryCondition(Matrix a, Matrix b, Matrix e, Formulation f)
      : a_(std::move(a)), b_(std::move(b)), e_(std::move(e)), formulation_(f) {}

  Matrix a_;
  Matrix b_;
  Matrix e_;
  Formulation formulation_;
};

struct UnitaryBC {
  Matrix u;
  UnitaryConvention convention = UnitaryConvention::harmer;
};

/// U = (A - iB) E^-2 (A^dag - iB^dag), harmer convention.
UnitaryBC to_unitary(const BoundaryCondition& bc);

/// harmer:      A = (U+I)/2,          B = i(U-I)/2
/// cosine_sine: A = i(U-U^dag)/2,     B = (U+U^dag)/2
BoundaryCondition from_unitary(const UnitaryBC& u);

/// Separated conditions cos(t) psi_j(0) + sin(t) psi_j'(0) = 0 with
/// A = -diag(sin t), B = diag(cos t). Each angle must lie in (0, pi].
BoundaryCondition from_angles(std::span<const double> thetas);

/// (A E^-1, B E^-1); the block matrix [[B, A], [A, -B]] becomes unitary.
BoundaryCondition normalize(const BoundaryCondition& bc);

/// Residual ||C^dag C - I|| of C = [[B, A], [A, -B]].
double block_unitarity_residual(const BoundaryCondition& bc);

/// (A, B) -> (A D^dag, B D^dag). Throws ValidationError if D is singular or
/// its condition number exceeds kGaugeConditionCap.
BoundaryCondition gauge_transform(const BoundaryCondition& bc, const Matrix& d);

/// True iff both pairs describe the same boundary subspace, i.e. the n x 2n
/// maps [-B^dag  A^dag] have the same kernel.
bool bc_subspace_equal(const BoundaryCondition& lhs, const BoundaryCondition& rhs);

}  // namespace halfline
