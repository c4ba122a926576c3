#pragma once

#include <vector>

#include "halfline/types.hpp"

namespace halfline {

/// V(x) = v on [x_lo, x_hi).
struct PotentialPiece {
  double x_lo = 0.0;
  double x_hi = 0.0;
  Matrix v;
};

/// Compactly supported, piecewise-constant Hermitian matrix potential.
/// V vanishes outside the pieces and for x >= x_max().
class Potential {
 public:
  /// Validates ordering, disjointness and Hermiticity (relative tolerance
  /// kHermitianTolerance); throws ValidationError otherwise. Pieces are sorted.
  static Potential make(Eigen::Index n, std::vector<PotentialPiece> pieces);
  static Potential zero(Eigen::Index n);

  Eigen::Index n() const { return n_; }
  const std::vector<PotentialPiece>& pieces() const { return pieces_; }
  /// Right end of the support; 0 for the zero potential.
  double x_max() const { return x_max_; }
  bool is_zero() const { return pieces_.empty(); }

  /// Index of the piece containing x (half-open), or -1 where V = 0.
  int piece_index(double x) const;

  /// Piece boundaries strictly inside (lo, hi), ascending.
  std::vector<double> breakpoints_between(double lo, double hi) const;

  static constexpr double kHermitianTolerance = 1e-10;

 private:
  Potential(Eigen::Index n, std::vector<PotentialPiece> pieces, double x_max)
      : n_(n), pieces_(std::move(pieces)), x_max_(x_max) {}

  Eigen::Index n_ = 0;
  std::vector<PotentialPiece> pieces_;
  double x_max_ = 0.0;
};

}  // namespace halfline
