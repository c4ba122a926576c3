#include "halfline/scattering.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

#include "halfline/linalg.hpp"

namespace halfline {
namespace {

void require_upper_half(Complex k) {
  if (k.imag() < 0.0) throw ValidationError("k must lie in the closed upper half plane");
}

void require_same_size(const Potential& pot, const BoundaryCondition& bc) {
  if (pot.n() != bc.n()) throw ValidationError("boundary condition and potential sizes differ");
}

Matrix guarded_inverse(const Matrix& m, const char* what) {
  const double cond = linalg::condition_number(m);
  if (!(cond <= kJostConditionCap)) {
    std::ostringstream os;
    os << what << " is numerically singular (cond = " << cond << ")";
    throw NumericalError(os.str());
  }
  return m.inverse();
}

Matrix jost_at(const Potential& pot, const BoundaryCondition& bc, Complex k, double x,
               const SolverConfig& cfg) {
  const StateMatrix f = jost_solution(pot, -std::conj(k), x, cfg);
  const StateMatrix phi = regular_solution(pot, bc, k, x, cfg);
  return wronskian(f, phi, true);
}

}  // namespace

JostEvaluation jost_matrix(const Potential& pot, const BoundaryCondition& bc, Complex k, double a,
                           const SolverConfig& cfg) {
  require_upper_half(k);
  require_same_size(pot, bc);
  JostEvaluation out;
  out.k = k;
  out.j = jost_at(pot, bc, k, 0.0, cfg);
  if (a > 0.0) out.consistency = (jost_at(pot, bc, k, a, cfg) - out.j).norm();
  out.cond = linalg::condition_number(out.j);
  if (!out.j.allFinite()) throw NumericalError("non-finite Jost matrix");
  return out;
}

Matrix jost_matrix_zero(const Potential& pot, const BoundaryCondition& bc, const SolverConfig& cfg) {
  require_same_size(pot, bc);
  const StateMatrix f0 = jost_solution(pot, 0.0, 0.0, cfg);
  Matrix j0 = f0.value.adjoint() * bc.b() - f0.deriv.adjoint() * bc.a();
  if (pot.is_zero()) return j0;

  const Matrix by_integral =
      bc.b() + potential_moment(pot, 0.0, {0.0, bc.a(), bc.b()}, 0.0, 0, cfg);
  const Matrix beta = zero_energy_decomposition(pot, bc, cfg).beta;
  const double scale = std::max(1.0, j0.norm());
  const double d1 = (by_integral - j0).norm();
  const double d2 = (beta - j0).norm();
  if (d1 > 1e-7 * scale || d2 > 1e-7 * scale) {
    std::ostringstream os;
    os << "J(0) routes disagree (integral: " << d1 << ", decomposition: " << d2
       << "); tighten the solver tolerances";
    throw NumericalError(os.str());
  }
  return j0;
}

Matrix l_matrix(const Potential& pot, const BoundaryCondition& bc, double k, const SolverConfig& cfg) {
  require_same_size(pot, bc);
  const StateMatrix f = jost_solution(pot, -k, 0.0, cfg);
  const Matrix e2 = bc.e_inverse_squared();
  return f.deriv.adjoint() * bc.b() * e2 + f.value.adjoint() * bc.a() * e2;
}

SMatrixEvaluation smatrix(const Potential& pot, const BoundaryCondition& bc, double k,
                          const SolverConfig& cfg) {
  if (k == 0.0) throw ValidationError("S(k) by definition needs k != 0; use the zero-energy pipeline");
  const double a = resolve_a(pot, cfg);
  const JostEvaluation jp = jost_matrix(pot, bc, k, a, cfg);
  const JostEvaluation jm = jost_matrix(pot, bc, -k, a, cfg);
  if (!(jp.cond <= kJostConditionCap)) {
    std::ostringstream os;
    os << "J(k) at k = " << k << " is numerically singular (cond = " << jp.cond << ")";
    throw NumericalError(os.str());
  }
  SMatrixEvaluation out;
  out.k = k;
  out.s = -linalg::right_solve(jp.j, jm.j);
  const Eigen::Index n = bc.n();
  out.unitarity_residual = (out.s.adjoint() * out.s - Matrix::Identity(n, n)).norm();
  out.det_j_abs = std::abs(jp.j.determinant());
  return out;
}

FreeClosedForms free_closed_forms(const BoundaryCondition& bc, Complex k) {
  FreeClosedForms out;
  out.j = bc.b() - kI * k * bc.a();
  const Eigen::FullPivLU<Matrix> lu(out.j);
  if (lu.isInvertible()) out.s = -linalg::right_solve(out.j, bc.b() + kI * k * bc.a());
  return out;
}

Matrix p_matrix(const Potential& pot, Complex k, double a, const SolverConfig& cfg) {
  require_upper_half(k);
  const StateMatrix f0 = jost_solution(pot, 0.0, a, cfg);
  const StateMatrix fk = jost_solution(pot, k, a, cfg);
  return f0.value.adjoint() * fk.deriv - f0.deriv.adjoint() * fk.value;
}

Matrix log_derivative(const Potential& pot, Complex k, double a, LogDerivativeMode mode,
                      const SolverConfig& cfg) {
  require_upper_half(k);
  const StateMatrix f = jost_solution(pot, k, a, cfg);
  if (mode == LogDerivativeMode::value) return f.deriv * guarded_inverse(f.value, "f(k,a)");
  return f.value * guarded_inverse(f.deriv, "f'(k,a)");
}

JostDecomposition jost_decomposition(const Potential& pot, const BoundaryCondition& bc, Complex k, double a,
                                     const SolverConfig& cfg) {
  require_upper_half(k);
  require_same_size(pot, bc);
  const Complex km = -std::conj(k);
  const StateMatrix f0 = jost_solution(pot, 0.0, a, cfg);
  const Matrix f0_inv = guarded_inverse(f0.value, "f(0,a)");
  const StateMatrix phi = regular_solution(pot, bc, k, a, cfg);
  const Matrix p = p_matrix(pot, km, a, cfg);
  const StateMatrix fm = jost_solution(pot, km, a, cfg);
  // omega(-k*, .) coincides with f(0, .) in value and derivative at x = a.
  const StateMatrix omega{a, f0.value, f0.deriv};
  JostDecomposition out;
  out.t1 = -p.adjoint() * f0_inv * phi.value;
  out.t2 = fm.value.adjoint() * f0_inv.adjoint() * wronskian(omega, phi, true);
  return out;
}

Complex scalar_jost_function(const Potential& pot, double theta, Complex k, const SolverConfig& cfg) {
  if (pot.n() != 1) throw ValidationError("scalar Jost function needs n = 1");
  if (!(theta > 0.0 && theta <= std::numbers::pi)) throw ValidationError("theta outside (0, pi]");
  const StateMatrix f = jost_solution(pot, k, 0.0, cfg);
  if (theta == std::numbers::pi) return f.value(0, 0);
  return -kI * (f.deriv(0, 0) + f.value(0, 0) * std::cos(theta) / std::sin(theta));
}

Complex scalar_smatrix(const Potential& pot, double theta, double k, const SolverConfig& cfg) {
  const Complex ratio = scalar_jost_function(pot, theta, -k, cfg) / scalar_jost_function(pot, theta, k, cfg);
  return theta == std::numbers::pi ? ratio : -ratio;
}

}  // namespace halfline
