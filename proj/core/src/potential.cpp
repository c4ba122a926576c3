#include "halfline/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace halfline {

Potential Potential::make(Eigen::Index n, std::vector<PotentialPiece> pieces) {
  if (n <= 0) throw ValidationError("potential size n must be positive");
  std::sort(pieces.begin(), pieces.end(),
            [](const PotentialPiece& l, const PotentialPiece& r) { return l.x_lo < r.x_lo; });
  double x_max = 0.0;
  for (size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    std::ostringstream where;
    where << "pieces[" << i << "]";
    if (!std::isfinite(p.x_lo) || !std::isfinite(p.x_hi) || p.x_lo < 0.0 || p.x_hi <= p.x_lo)
      throw ValidationError(where.str() + ": need 0 <= x_lo < x_hi");
    if (p.v.rows() != n || p.v.cols() != n) throw ValidationError(where.str() + ": V has the wrong size");
    if (!p.v.allFinite()) throw ValidationError(where.str() + ": V has non-finite entries");
    const double herm = (p.v - p.v.adjoint()).norm();
    if (herm > kHermitianTolerance * std::max(1.0, p.v.norm())) {
      std::ostringstream os;
      os << where.str() << ": V is not Hermitian (||V - V^dag|| = " << herm << ")";
      throw ValidationError(os.str());
    }
    if (i > 0 && p.x_lo < pieces[i - 1].x_hi)
      throw ValidationError(where.str() + ": overlaps the previous piece");
    x_max = std::max(x_max, p.x_hi);
  }
  // Symmetrize so round-off in the input cannot break selfadjointness later.
  for (auto& p : pieces) p.v = 0.5 * (p.v + p.v.adjoint()).eval();
  return Potential(n, std::move(pieces), x_max);
}

Potential Potential::zero(Eigen::Index n) { return make(n, {}); }

int Potential::piece_index(double x) const {
  for (size_t i = 0; i < pieces_.size(); ++i)
    if (x >= pieces_[i].x_lo && x < pieces_[i].x_hi) return static_cast<int>(i);
  return -1;
}

std::vector<double> Potential::breakpoints_between(double lo, double hi) const {
  std::vector<double> out;
  for (const auto& p : pieces_) {
    if (p.x_lo > lo && p.x_lo < hi) out.push_back(p.x_lo);
    if (p.x_hi > lo && p.x_hi < hi) out.push_back(p.x_hi);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace halfline
