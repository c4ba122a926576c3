#include "halfline/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

namespace halfline {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<std::array<double, 6>, 7> kA{{
    {0, 0, 0, 0, 0, 0},
    {1.0 / 5, 0, 0, 0, 0, 0},
    {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
    {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
}};
constexpr std::array<double, 7> kB5{35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
constexpr std::array<double, 7> kB4{5179.0 / 57600, 0,           7571.0 / 16695, 393.0 / 640,
                                    -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

// Y = [psi; psi'] stacked as a 2n x p matrix; Y' = [psi'; M psi].
Matrix rhs(const Matrix& m, const Matrix& y) {
  const Eigen::Index n = m.rows();
  Matrix out(y.rows(), y.cols());
  out.topRows(n) = y.bottomRows(n);
  out.bottomRows(n) = m * y.topRows(n);
  return out;
}

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, const SolverConfig& cfg) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < err.rows(); ++i)
    for (Eigen::Index j = 0; j < err.cols(); ++j) {
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
      worst = std::max(worst, std::abs(err(i, j)) / scale);
    }
  return worst;
}

// Integrates Y' = [[0, I], [V - k^2, 0]] Y across one constant piece.
Matrix integrate_piece(const Matrix& v, Complex k2, Matrix y, double x0, double x1, const SolverConfig& cfg) {
  const Eigen::Index n = v.rows();
  const Matrix m = v - k2 * Matrix::Identity(n, n);
  const double dir = x1 > x0 ? 1.0 : -1.0;
  double x = x0;
  double h = dir * std::min(cfg.max_step, std::abs(x1 - x0));
  std::array<Matrix, 7> stages;
  while (dir * (x1 - x) > 0.0) {
    if (dir * (x + h - x1) > 0.0) h = x1 - x;
    const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
    if (std::abs(h) < h_floor) {
      std::ostringstream os;
      os << "step size underflow at x = " << x << " (h = " << h << ")";
      throw NumericalError(os.str());
    }
    for (size_t s = 0; s < 7; ++s) {
      Matrix ys = y;
      for (size_t j = 0; j < s; ++j)
        if (kA[s][j] != 0.0) ys += (h * kA[s][j]) * stages[j];
      stages[s] = rhs(m, ys);
    }
    Matrix y5 = y;
    Matrix err = Matrix::Zero(y.rows(), y.cols());
    for (size_t s = 0; s < 7; ++s) {
      if (kB5[s] != 0.0) y5 += (h * kB5[s]) * stages[s];
      err += (h * (kB5[s] - kB4[s])) * stages[s];
    }
    if (!y5.allFinite()) throw NumericalError("non-finite state during propagation");
    const double en = error_norm(err, y, y5, cfg);
    if (en <= 1.0) {
      x += h;
      y = std::move(y5);
    }
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    h = dir * std::min(cfg.max_step, std::abs(h) * factor);
  }
  return y;
}

// Exact free propagation over length h: only k^2 enters.
Matrix free_step(Complex k2, const Matrix& y, double h, Eigen::Index n) {
  const Complex kq = std::sqrt(k2);
  const Complex c = std::cos(kq * h);
  const Complex s = sinc_k(kq, h);
  Matrix out(y.rows(), y.cols());
  out.topRows(n) = c * y.topRows(n) + s * y.bottomRows(n);
  out.bottomRows(n) = (-k2 * s) * y.topRows(n) + c * y.bottomRows(n);
  return out;
}

StateMatrix from_stacked(double x, const Matrix& y, Eigen::Index n) {
  return {x, y.topRows(n), y.bottomRows(n)};
}

Matrix stack(const StateMatrix& s) {
  Matrix y(2 * s.value.rows(), s.value.cols());
  y << s.value, s.deriv;
  return y;
}

}  // namespace

Complex sinc_k(Complex k, double x) {
  const Complex kx = k * x;
  if (std::abs(kx) < 1e-4) {
    const Complex z2 = kx * kx;
    return x * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
  }
  return std::sin(kx) / k;
}

StateMatrix propagate(const Potential& pot, Complex k, const StateMatrix& state, double x_target,
                      const SolverConfig& cfg) {
  if (x_target < 0.0) throw ValidationError("propagation target must be >= 0");
  if (!state.value.allFinite() || !state.deriv.allFinite())
    throw ValidationError("initial state has non-finite entries");
  const Eigen::Index n = pot.n();
  if (state.value.rows() != n || state.deriv.rows() != n)
    throw ValidationError("state rows do not match the potential size");
  const Complex k2 = k * k;
  Matrix y = stack(state);
  if (x_target == state.x) return state;

  const double lo = std::min(state.x, x_target);
  const double hi = std::max(state.x, x_target);
  std::vector<double> cuts = pot.breakpoints_between(lo, hi);
  if (x_target < state.x) std::reverse(cuts.begin(), cuts.end());
  cuts.push_back(x_target);

  double x = state.x;
  for (double next : cuts) {
    const int idx = pot.piece_index(0.5 * (x + next));
    if (idx < 0)
      y = free_step(k2, y, next - x, n);
    else
      y = integrate_piece(pot.pieces()[static_cast<size_t>(idx)].v, k2, std::move(y), x, next, cfg);
    x = next;
  }
  return from_stacked(x_target, y, n);
}

std::vector<StateMatrix> propagate_through(const Potential& pot, Complex k, const StateMatrix& state,
                                           const std::vector<double>& xs, const SolverConfig& cfg) {
  std::vector<StateMatrix> out;
  out.reserve(xs.size());
  StateMatrix cur = state;
  for (double x : xs) {
    cur = propagate(pot, k, cur, x, cfg);
    out.push_back(cur);
  }
  return out;
}

StateMatrix jost_solution(const Potential& pot, Complex k, double x, const SolverConfig& cfg) {
  if (x < 0.0) throw ValidationError("x must be >= 0");
  const Eigen::Index n = pot.n();
  const Matrix id = Matrix::Identity(n, n);
  const double xm = pot.x_max();
  if (x >= xm) {
    const Complex e = std::exp(kI * k * x);
    return {x, e * id, kI * k * e * id};
  }
  const Complex e = std::exp(kI * k * xm);
  return propagate(pot, k, {xm, e * id, kI * k * e * id}, x, cfg);
}

ZeroEnergyPair zero_energy_pair(const Potential& pot, double x, const SolverConfig& cfg) {
  const Eigen::Index n = pot.n();
  const Matrix id = Matrix::Identity(n, n);
  const double xm = pot.x_max();
  StateMatrix f0 = jost_solution(pot, 0.0, x, cfg);
  StateMatrix g0 = propagate(pot, 0.0, {xm, xm * id, id}, x, cfg);
  return {std::move(f0), std::move(g0)};
}

StateMatrix regular_solution(const Potential& pot, const BoundaryCondition& bc, Complex k, double x,
                             const SolverConfig& cfg) {
  if (bc.n() != pot.n()) throw ValidationError("boundary condition and potential sizes differ");
  return propagate(pot, k, {0.0, bc.a(), bc.b()}, x, cfg);
}

StateMatrix omega_solution(const Potential& pot, Complex k, double a, double x, const SolverConfig& cfg) {
  const StateMatrix fa = jost_solution(pot, 0.0, a, cfg);
  return propagate(pot, k, {a, fa.value, fa.deriv}, x, cfg);
}

CosineSinePair cs_solutions(const Potential& pot, Complex k, double a, double x, const SolverConfig& cfg) {
  if (a < 0.0) throw ValidationError("a must be >= 0");
  const Eigen::Index n = pot.n();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix zero = Matrix::Zero(n, n);
  return {propagate(pot, k, {a, id, zero}, x, cfg), propagate(pot, k, {a, zero, id}, x, cfg)};
}

Matrix wronskian(const StateMatrix& f, const StateMatrix& g, bool conjugate_first) {
  if (f.x != g.x) {
    std::ostringstream os;
    os << "Wronskian of states at different points (" << f.x << " vs " << g.x << ")";
    throw ValidationError(os.str());
  }
  if (conjugate_first) return f.value.adjoint() * g.deriv - f.deriv.adjoint() * g.value;
  return f.value * g.deriv - f.deriv * g.value;
}

ZeroEnergyDecomposition zero_energy_decomposition(const Potential& pot, const BoundaryCondition& bc,
                                                  const SolverConfig& cfg) {
  const double xm = pot.x_max();
  const StateMatrix phi = regular_solution(pot, bc, 0.0, xm, cfg);
  Matrix beta = phi.deriv;
  Matrix alpha = phi.value - xm * beta;
  return {std::move(alpha), std::move(beta)};
}

Matrix potential_moment(const Potential& pot, Complex k, const StateMatrix& state, double x_from, int power,
                        const SolverConfig& cfg) {
  using Rule = boost::math::quadrature::gauss<double, 15>;
  const auto& absc = Rule::abscissa();
  const auto& wts = Rule::weights();
  constexpr double kMaxPanel = 0.125;

  struct Node {
    double x;
    double w;
    int piece;
  };
  std::vector<Node> nodes;
  for (size_t p = 0; p < pot.pieces().size(); ++p) {
    const auto& piece = pot.pieces()[p];
    const double lo = std::max(piece.x_lo, x_from);
    const double hi = piece.x_hi;
    if (hi <= lo) continue;
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / kMaxPanel)));
    const double width = (hi - lo) / panels;
    for (int q = 0; q < panels; ++q) {
      const double mid = lo + (q + 0.5) * width;
      const double half = 0.5 * width;
      for (size_t i = 0; i < absc.size(); ++i) {
        if (absc[i] == 0.0) {
          nodes.push_back({mid, half * wts[i], static_cast<int>(p)});
        } else {
          nodes.push_back({mid - half * absc[i], half * wts[i], static_cast<int>(p)});
          nodes.push_back({mid + half * absc[i], half * wts[i], static_cast<int>(p)});
        }
      }
    }
  }

  // Walk outward from the state's position in both directions.
  std::vector<Node> below, above;
  for (const auto& nd : nodes) (nd.x < state.x ? below : above).push_back(nd);
  std::sort(below.begin(), below.end(), [](const Node& l, const Node& r) { return l.x > r.x; });
  std::sort(above.begin(), above.end(), [](const Node& l, const Node& r) { return l.x < r.x; });

  Matrix total = Matrix::Zero(pot.n(), state.value.cols());
  for (const auto* group : {&below, &above}) {
    StateMatrix cur = state;
    for (const auto& nd : *group) {
      cur = propagate(pot, k, cur, nd.x, cfg);
      const double weight = nd.w * std::pow(nd.x, power);
      total += weight * (pot.pieces()[static_cast<size_t>(nd.piece)].v * cur.value);
    }
  }
  return total;
}

MomentResiduals moment_identities_residual(const Potential& pot, double a, const SolverConfig& cfg) {
  const Eigen::Index n = pot.n();
  const Matrix id = Matrix::Identity(n, n);
  const double xm = pot.x_max();
  if (pot.is_zero()) return {};
  if (a >= xm) throw ValidationError("moment identities need a < x_max");
  const StateMatrix start{xm, id, Matrix::Zero(n, n)};
  const StateMatrix fa = jost_solution(pot, 0.0, a, cfg);
  const Matrix m0 = potential_moment(pot, 0.0, start, a, 0, cfg);
  const Matrix m1 = potential_moment(pot, 0.0, start, a, 1, cfg);
  MomentResiduals out;
  out.r1 = (m0 + fa.deriv).norm();
  out.r2 = (m1 - fa.value + a * fa.deriv + id).norm();
  return out;
}

double resolve_a(const Potential& pot, const SolverConfig& cfg) {
  if (cfg.a) {
    if (*cfg.a < 0.0) throw ValidationError("free point a must be >= 0");
    return *cfg.a;
  }
  return pot.x_max();
}

}  // namespace halfline
