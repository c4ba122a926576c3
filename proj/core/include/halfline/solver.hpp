#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "halfline/bc.hpp"
#include "halfline/potential.hpp"
#include "halfline/types.hpp"

namespace halfline {

/// Tolerances for the adaptive integrator and the choice of the free point a.
struct SolverConfig {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  double max_step = 0.05;
  /// nullopt means "auto": a = x_max, where f(0,a) = I exactly.
  std::optional<double> a;
};

/// Snapshot (x, psi(x), psi'(x)) of an n x p matrix solution of
/// -psi'' + V psi = k^2 psi.
struct StateMatrix {
  double x = 0.0;
  Matrix value;
  Matrix deriv;
};

/// Propagates `state` to x_target (either direction). Zero-potential stretches
/// use the exact free propagator; constant pieces use an embedded
/// Dormand-Prince 5(4) pair with steps aligned to the piece boundaries.
/// Only k^2 enters, so the result is even in k.
/// Throws NumericalError on step-size underflow.
StateMatrix propagate(const Potential& pot, Complex k, const StateMatrix& state, double x_target,
                      const SolverConfig& cfg = {});

/// Propagates through every point of `xs` in the given order, returning one
/// state per point.
std::vector<StateMatrix> propagate_through(const Potential& pot, Complex k, const StateMatrix& state,
                                           const std::vector<double>& xs, const SolverConfig& cfg = {});

/// Jost solution f(k,x): exactly e^{ikx} I (and ik e^{ikx} I) for x >= x_max.
StateMatrix jost_solution(const Potential& pot, Complex k, double x, const SolverConfig& cfg = {});

struct ZeroEnergyPair {
  StateMatrix f0;  // bounded solution, f(0,x) = I beyond x_max
  StateMatrix g0;  // g(0,x) = x I beyond x_max
};
ZeroEnergyPair zero_energy_pair(const Potential& pot, double x, const SolverConfig& cfg = {});

/// Regular solution with phi(k,0) = A, phi'(k,0) = B.
StateMatrix regular_solution(const Potential& pot, const BoundaryCondition& bc, Complex k, double x,
                             const SolverConfig& cfg = {});

/// omega(k,a) = f(0,a), omega'(k,a) = f'(0,a).
StateMatrix omega_solution(const Potential& pot, Complex k, double a, double x,
                           const SolverConfig& cfg = {});

struct CosineSinePair {
  StateMatrix c;  // C(k,a) = I, C'(k,a) = 0
  StateMatrix s;  // S(k,a) = 0, S'(k,a) = I
};
CosineSinePair cs_solutions(const Potential& pot, Complex k, double a, double x,
                            const SolverConfig& cfg = {});

/// [F;G] = F G' - F' G, or F^dag G' - F'^dag G when conjugate_first.
/// Throws ValidationError when the states sit at different x.
Matrix wronskian(const StateMatrix& f, const StateMatrix& g, bool conjugate_first);

struct ZeroEnergyDecomposition {
  Matrix alpha;
  Matrix beta;  // equals J(0)
};
/// Coefficients of phi(0,x) = f(0,x) alpha + g(0,x) beta, read off at x_max.
ZeroEnergyDecomposition zero_energy_decomposition(const Potential& pot, const BoundaryCondition& bc,
                                                  const SolverConfig& cfg = {});

/// Integral of y^power V(y) psi(y) over [x_from, x_max], psi being the solution
/// through `state` at energy k^2. Gauss-Legendre on sub-intervals of each piece.
Matrix potential_moment(const Potential& pot, Complex k, const StateMatrix& state, double x_from,
                        int power, const SolverConfig& cfg = {});

struct MomentResiduals {
  double r1 = 0.0;  // || int_a^inf V omega(0,.) + f'(0,a) ||
  double r2 = 0.0;  // || int_a^inf y V omega(0,.) - f(0,a) + a f'(0,a) + I ||
};
MomentResiduals moment_identities_residual(const Potential& pot, double a, const SolverConfig& cfg = {});

/// The free point a actually used: cfg.a or x_max when unset.
double resolve_a(const Potential& pot, const SolverConfig& cfg);

/// sin(kx)/k, by series for |kx| < 1e-4 (value x at k = 0).
Complex sinc_k(Complex k, double x);

}  // namespace halfline
