#pragma once

#include <optional>

#include "halfline/bc.hpp"
#include "halfline/potential.hpp"
#include "halfline/solver.hpp"
#include "halfline/types.hpp"

namespace halfline {

/// J(k) inversions beyond this condition number are refused.
inline constexpr double kJostConditionCap = 1e10;

struct JostEvaluation {
  Complex k;
  Matrix j;
  double cond = 1.0;
  /// || J evaluated at x = 0 minus J evaluated at x = a ||.
  double consistency = 0.0;
};

struct SMatrixEvaluation {
  double k = 0.0;
  Matrix s;
  double unitarity_residual = 0.0;  // ||S^dag S - I||, recorded, not assumed
  double det_j_abs = 0.0;           // |det J(k)|, NaN when produced at k = 0
};

/// J(k) = f(-k*,x)^dag phi'(k,x) - f'(-k*,x)^dag phi(k,x), evaluated at x = 0
/// and cross-checked at x = a. Requires Im k >= 0.
JostEvaluation jost_matrix(const Potential& pot, const BoundaryCondition& bc, Complex k, double a,
                           const SolverConfig& cfg = {});

/// J(0) by the Wronskian at x = 0, checked against B + int V phi(0,.) and
/// against beta of the zero-energy decomposition. Throws NumericalError when
/// the routes disagree beyond 1e-7 relative.
Matrix jost_matrix_zero(const Potential& pot, const BoundaryCondition& bc, const SolverConfig& cfg = {});

/// L(k) = f'(-k,0)^dag B E^-2 + f(-k,0)^dag A E^-2 for real k.
Matrix l_matrix(const Potential& pot, const BoundaryCondition& bc, double k, const SolverConfig& cfg = {});

/// S(k) = -J(-k) J(k)^{-1} for real k != 0, by a linear solve.
/// Throws ValidationError for k = 0 and NumericalError if cond J(k) > kJostConditionCap.
SMatrixEvaluation smatrix(const Potential& pot, const BoundaryCondition& bc, double k,
                          const SolverConfig& cfg = {});

struct FreeClosedForms {
  Matrix j;                // B - ikA
  std::optional<Matrix> s; // -(B + ikA)(B - ikA)^{-1}; empty when B - ikA is singular
};
FreeClosedForms free_closed_forms(const BoundaryCondition& bc, Complex k);

/// P(k) = f(0,a)^dag f'(k,a) - f'(0,a)^dag f(k,a).
Matrix p_matrix(const Potential& pot, Complex k, double a, const SolverConfig& cfg = {});

enum class LogDerivativeMode { value, derivative };

/// f'(k,a) f(k,a)^{-1} (value) or f(k,a) f'(k,a)^{-1} (derivative).
Matrix log_derivative(const Potential& pot, Complex k, double a, LogDerivativeMode mode,
                      const SolverConfig& cfg = {});

struct JostDecomposition {
  Matrix t1;  // -P(-k*)^dag f(0,a)^{-1} phi(k,a)
  Matrix t2;  // f(-k*,a)^dag [f(0,a)^{-1}]^dag [omega(-k*,.)^dag; phi(k,.)]
};
JostDecomposition jost_decomposition(const Potential& pot, const BoundaryCondition& bc, Complex k, double a,
                                     const SolverConfig& cfg = {});

/// Scalar Jost function F_theta(k) and scattering function S_theta(k) in the
/// classical convention: theta in (0, pi) uses -i[f'(k,0) + cot(theta) f(k,0)],
/// theta = pi uses f(k,0), and the Dirichlet S_theta carries the opposite sign
/// to the matrix S(k). Regression use only; n must be 1.
Complex scalar_jost_function(const Potential& pot, double theta, Complex k, const SolverConfig& cfg = {});
Complex scalar_smatrix(const Potential& pot, double theta, double k, const SolverConfig& cfg = {});

}  // namespace halfline
