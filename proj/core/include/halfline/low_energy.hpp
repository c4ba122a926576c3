#pragma once

#include <vector>

#include "halfline/bc.hpp"
#include "halfline/jordan.hpp"
#include "halfline/potential.hpp"
#include "halfline/solver.hpp"
#include "halfline/types.hpp"

namespace halfline {

/// Column/row index maps of the permutations that collect the superdiagonal
/// ones of the zero Jordan blocks into an identity block.
struct PermutationIndices {
  std::vector<int> q;      // P1 column j is e_{q[j]} (zero-based, length nu)
  std::vector<int> sigma;  // P2 row k is e_{sigma[k]}^T (zero-based, length nu)
};

PermutationIndices permutation_indices(const std::vector<int>& zero_chain_lengths);

template <class Scalar>
struct BasicLowEnergyExpansion {
  linalg::Mat<Scalar> p1, p2;
  linalg::Mat<Scalar> r;
  linalg::Mat<Scalar> a1, b1, c1, d0;
  linalg::Mat<Scalar> s0;
  linalg::Mat<Scalar> l_minus1;  // residue of J(k)^{-1} at k = 0 (zero when mu = 0)
};

using LowEnergyExpansion = BasicLowEnergyExpansion<Complex>;
using ExactLowEnergyExpansion = BasicLowEnergyExpansion<GaussianRational>;

struct Permutations {
  Matrix p1, p2;
};
Permutations build_permutations(const JordanData& jd);

/// R = f(0,a)^{-1} phi(0,a). Throws NumericalError if f(0,a) is singular.
Matrix r_matrix(const Potential& pot, const BoundaryCondition& bc, double a, const SolverConfig& cfg = {});

struct ZBlocks {
  Matrix a1, b1, c1, d0;
};
/// Constant blocks of Z(k) from R. Throws NumericalError if A1 is singular.
ZBlocks z_blocks(const JordanData& jd, const Matrix& r, const Matrix& p1, const Matrix& p2);

/// Z(k) = P2 Sinv F(k) Smat P1 with F(k) = f(0,a)^dag [f(-k*,a)^dag]^{-1} J(k).
Matrix z_of_k(const Potential& pot, const BoundaryCondition& bc, Complex k, double a, const JordanData& jd,
              const Matrix& p1, const Matrix& p2, const SolverConfig& cfg = {});

/// Block inverse of [[A, B], [C, D]] through the Schur complement of D.
/// Throws NumericalError if D or the complement is singular.
Matrix schur_inverse(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d);

/// Assembles the expansion (S(0) and the residue of J(k)^{-1}) from a Jordan
/// decomposition of J(0) and R. Works over Complex and GaussianRational.
LowEnergyExpansion low_energy_expansion(const JordanData& jd, const Matrix& r);
ExactLowEnergyExpansion low_energy_expansion(const ExactJordanData& jd, const ExactMatrix& r);
LowEnergyExpansion to_numeric(const ExactLowEnergyExpansion& e);

struct ContinuityProbe {
  double k = 0.0;
  double dist = 0.0;  // ||S(k) - S(0)||
};

struct SZeroOptions {
  JordanMode mode = JordanMode::numeric;
  std::vector<double> probes{1e-1, 1e-2, 1e-3};
};

struct SZeroResult {
  JordanData jd;
  LowEnergyExpansion expansion;
  Matrix j0;
  double eps_eig = 0.0;
  double eps_rank = 0.0;
  double involution_residual = 0.0;  // ||S0^2 - I||
  double unitarity_residual = 0.0;   // ||S0^dag S0 - I||
  bool exact = false;                // the whole pipeline ran in rational arithmetic
  std::vector<ContinuityProbe> probes;
};

/// Zero-energy scattering matrix through the Jordan pipeline.
/// Exact mode needs V = 0 and Gaussian-rational A, B (ValidationError otherwise).
SZeroResult s_zero(const Potential& pot, const BoundaryCondition& bc, double a, const SZeroOptions& opts = {},
                   const SolverConfig& cfg = {});

/// Tolerances used by s_zero: eps_eig = 1e-8 s, eps_rank = 1e-10 s with
/// s = max(||J(0)||, ||R||, tiny).
double low_energy_scale(const Matrix& j0, const Matrix& r);

struct JostInverseAsymptotics {
  Matrix leading;
  int order = 0;  // 1: J(k)^{-1} ~ leading / k; 0: J(k)^{-1} -> leading
};
JostInverseAsymptotics jost_inverse_asymptotics(const LowEnergyExpansion& e, const JordanData& jd);

struct KernelBijection {
  Vector xi;
  double adjoint_residual = 0.0;   // ||J(0)^dag xi||
  double solution_residual = 0.0;  // max over sampled x of ||phi(0,x)u - f(0,x)xi||
};
/// xi = f(0,a)^{-1} phi(0,a) u for u in Ker J(0). Throws ValidationError when
/// ||J(0)u|| exceeds tol * ||u||.
KernelBijection kernel_bijection(const Potential& pot, const BoundaryCondition& bc, double a, const Vector& u,
                                 double tol = 1e-8, const SolverConfig& cfg = {});

struct KernelCharacterization {
  bool in_kernel = false;
  Vector phi_prime_limit;  // phi'(0, x_max) u
  double growth = 0.0;     // ||phi(0, X) u|| / max(1, ||phi(0, x_max) u||) for X = x_max + 1e6
};
KernelCharacterization kernel_characterization(const Potential& pot, const BoundaryCondition& bc, const Vector& u,
                                               double tol = 1e-8, const SolverConfig& cfg = {});

}  // namespace halfline
