#include "halfline/low_energy.hpp"

#include <algorithm>
#include <sstream>

#include "halfline/linalg.hpp"
#include "halfline/scattering.hpp"

namespace halfline {
namespace {

template <class Scalar>
using Mat = linalg::Mat<Scalar>;

constexpr long long kMaxDenominator = 1000000;
constexpr double kBlockConditionCap = 1e10;

std::vector<int> zero_chain_lengths(const auto& jd) {
  std::vector<int> out;
  for (int alpha = 0; alpha < jd.mu; ++alpha) out.push_back(jd.chains[static_cast<size_t>(alpha)].length);
  return out;
}

template <class Scalar>
std::pair<Mat<Scalar>, Mat<Scalar>> permutation_matrices(const BasicJordanData<Scalar>& jd) {
  const Eigen::Index n = jd.n();
  const PermutationIndices idx = permutation_indices(zero_chain_lengths(jd));
  Mat<Scalar> p1 = Mat<Scalar>::Identity(n, n);
  Mat<Scalar> p2 = Mat<Scalar>::Identity(n, n);
  p1.topLeftCorner(jd.nu, jd.nu).setZero();
  p2.topLeftCorner(jd.nu, jd.nu).setZero();
  for (int j = 0; j < jd.nu; ++j) {
    p1(idx.q[static_cast<size_t>(j)], j) = Scalar(1);
    p2(j, idx.sigma[static_cast<size_t>(j)]) = Scalar(1);
  }
  return {p1, p2};
}

template <class Scalar>
BasicLowEnergyExpansion<Scalar> expand(const BasicJordanData<Scalar>& jd, const Mat<Scalar>& r,
                                       const Scalar& minus_i) {
  const Eigen::Index n = jd.n();
  const Eigen::Index mu = jd.mu;
  const Eigen::Index rest = n - mu;
  BasicLowEnergyExpansion<Scalar> e;
  std::tie(e.p1, e.p2) = permutation_matrices(jd);
  e.r = r;

  const Mat<Scalar> mt = e.p2 * jd.sinv * r * jd.smat * e.p1;
  e.a1 = minus_i * mt.topLeftCorner(mu, mu);
  e.b1 = minus_i * mt.topRightCorner(mu, rest);
  e.c1 = minus_i * mt.bottomLeftCorner(rest, mu);
  e.d0 = (e.p2 * jd.jordan_form() * e.p1).bottomRightCorner(rest, rest);

  Mat<Scalar> a1_inv(mu, mu);
  if (mu > 0) {
    auto inv = linalg::try_inverse<Scalar>(e.a1);
    if (!inv) throw NumericalError("A1 is singular: J(0) and R do not belong to the same problem");
    a1_inv = std::move(*inv);
  }

  Mat<Scalar> block = Mat<Scalar>::Zero(n, n);
  block.topLeftCorner(mu, mu) = Mat<Scalar>::Identity(mu, mu);
  block.bottomLeftCorner(rest, mu) = Scalar(2) * e.c1 * a1_inv;
  block.bottomRightCorner(rest, rest) = -Mat<Scalar>::Identity(rest, rest);
  e.s0 = jd.smat * e.p2.transpose() * block * e.p2 * jd.sinv;

  Mat<Scalar> residue = Mat<Scalar>::Zero(n, n);
  residue.topLeftCorner(mu, mu) = a1_inv;
  e.l_minus1 = jd.smat * e.p1 * residue * e.p2 * jd.sinv;
  return e;
}

ExactMatrix rationalize_matrix(const Matrix& m, const char* what) {
  ExactMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (!GaussianRational::rationalize(m(i, j), kMaxDenominator, 1e-12, out(i, j))) {
        std::ostringstream os;
        os << "exact mode: " << what << "(" << i << "," << j << ") = " << m(i, j)
           << " is not a Gaussian rational with small denominator";
        throw ValidationError(os.str());
      }
  return out;
}

Matrix guarded_inverse(const Matrix& m, const char* what) {
  const double cond = linalg::condition_number(m);
  if (!(cond <= kBlockConditionCap)) {
    std::ostringstream os;
    os << what << " is numerically singular (cond = " << cond << ")";
    throw NumericalError(os.str());
  }
  return m.inverse();
}

}  // namespace

PermutationIndices permutation_indices(const std::vector<int>& lengths) {
  const int mu = static_cast<int>(lengths.size());
  int nu = 0;
  for (int l : lengths) nu += l;
  // prefix[alpha] = n_1 + ... + n_alpha (one-based alpha).
  std::vector<int> prefix(static_cast<size_t>(mu + 1), 0);
  for (int alpha = 1; alpha <= mu; ++alpha)
    prefix[static_cast<size_t>(alpha)] = prefix[static_cast<size_t>(alpha - 1)] + lengths[static_cast<size_t>(alpha - 1)];

  // The unique chain alpha and position j >= 2 with prefix[alpha-1] - alpha + j = t.
  auto locate = [&](int t) {
    for (int alpha = 1; alpha <= mu; ++alpha)
      for (int j = 2; j <= lengths[static_cast<size_t>(alpha - 1)]; ++j)
        if (prefix[static_cast<size_t>(alpha - 1)] - alpha + j == t) return std::pair{alpha, j};
    throw NumericalError("permutation index out of range");
  };

  PermutationIndices out;
  for (int tau = 1; tau <= nu; ++tau) {
    int q = 0;
    int sigma = 0;
    if (tau <= mu) {
      q = prefix[static_cast<size_t>(tau - 1)] + 1;
      sigma = prefix[static_cast<size_t>(tau)];
    } else {
      const auto [alpha, j] = locate(tau - mu);
      q = tau - mu + alpha;
      sigma = tau - mu + alpha - 1;
    }
    out.q.push_back(q - 1);
    out.sigma.push_back(sigma - 1);
  }
  return out;
}

Permutations build_permutations(const JordanData& jd) {
  auto [p1, p2] = permutation_matrices(jd);
  return {std::move(p1), std::move(p2)};
}

Matrix r_matrix(const Potential& pot, const BoundaryCondition& bc, double a, const SolverConfig& cfg) {
  const StateMatrix f0 = jost_solution(pot, 0.0, a, cfg);
  const StateMatrix phi = regular_solution(pot, bc, 0.0, a, cfg);
  const double cond = linalg::condition_number(f0.value);
  if (!(cond <= kBlockConditionCap)) {
    std::ostringstream os;
    os << "f(0,a) is singular at a = " << a << " (cond = " << cond << "); choose a larger a";
    throw NumericalError(os.str());
  }
  return f0.value.partialPivLu().solve(phi.value);
}

ZBlocks z_blocks(const JordanData& jd, const Matrix& r, const Matrix& p1, const Matrix& p2) {
  const Eigen::Index n = jd.n();
  const Eigen::Index mu = jd.mu;
  const Matrix mt = p2 * jd.sinv * r * jd.smat * p1;
  ZBlocks z;
  z.a1 = -kI * mt.topLeftCorner(mu, mu);
  z.b1 = -kI * mt.topRightCorner(mu, n - mu);
  z.c1 = -kI * mt.bottomLeftCorner(n - mu, mu);
  z.d0 = (p2 * jd.jordan_form() * p1).bottomRightCorner(n - mu, n - mu);
  if (mu > 0) guarded_inverse(z.a1, "A1");
  return z;
}

Matrix z_of_k(const Potential& pot, const BoundaryCondition& bc, Complex k, double a, const JordanData& jd,
              const Matrix& p1, const Matrix& p2, const SolverConfig& cfg) {
  if (k.imag() < 0.0) throw ValidationError("k must lie in the closed upper half plane");
  const StateMatrix f0 = jost_solution(pot, 0.0, a, cfg);
  const StateMatrix fm = jost_solution(pot, -std::conj(k), a, cfg);
  const Matrix fm_adj = fm.value.adjoint();
  guarded_inverse(fm_adj, "f(-k*,a)");
  const Matrix j = jost_matrix(pot, bc, k, a, cfg).j;
  const Matrix f = linalg::right_solve(fm_adj, f0.value.adjoint()) * j;
  return p2 * jd.sinv * f * jd.smat * p1;
}

Matrix schur_inverse(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d) {
  const Eigen::Index p = a.rows();
  const Eigen::Index q = d.rows();
  if (a.cols() != p || d.cols() != q || b.rows() != p || b.cols() != q || c.rows() != q || c.cols() != p)
    throw ValidationError("schur_inverse: inconsistent block sizes");
  const Matrix d_inv = q > 0 ? guarded_inverse(d, "D") : Matrix(0, 0);
  const Matrix comp = a - b * d_inv * c;
  const Matrix comp_inv = p > 0 ? guarded_inverse(comp, "Schur complement A - B D^-1 C") : Matrix(0, 0);
  Matrix out(p + q, p + q);
  out.topLeftCorner(p, p) = comp_inv;
  out.topRightCorner(p, q) = -comp_inv * b * d_inv;
  out.bottomLeftCorner(q, p) = -d_inv * c * comp_inv;
  out.bottomRightCorner(q, q) = d_inv * c * comp_inv * b * d_inv + d_inv;
  return out;
}

LowEnergyExpansion low_energy_expansion(const JordanData& jd, const Matrix& r) {
  if (jd.mu > 0) {
    const Permutations p = build_permutations(jd);
    z_blocks(jd, r, p.p1, p.p2);  // conditioning check on A1
  }
  return expand<Complex>(jd, r, -kI);
}

ExactLowEnergyExpansion low_energy_expansion(const ExactJordanData& jd, const ExactMatrix& r) {
  return expand<GaussianRational>(jd, r, -kImagUnit);
}

LowEnergyExpansion to_numeric(const ExactLowEnergyExpansion& e) {
  return {to_numeric(e.p1), to_numeric(e.p2), to_numeric(e.r),  to_numeric(e.a1),      to_numeric(e.b1),
          to_numeric(e.c1), to_numeric(e.d0), to_numeric(e.s0), to_numeric(e.l_minus1)};
}

double low_energy_scale(const Matrix& j0, const Matrix& r) {
  return std::max({j0.norm(), r.norm(), 1e-300});
}

SZeroResult s_zero(const Potential& pot, const BoundaryCondition& bc, double a, const SZeroOptions& opts,
                   const SolverConfig& cfg) {
  if (pot.n() != bc.n()) throw ValidationError("boundary condition and potential sizes differ");
  const Eigen::Index n = bc.n();
  SZeroResult out;

  if (opts.mode == JordanMode::exact) {
    if (!pot.is_zero())
      throw ValidationError("exact mode needs V = 0 (J(0) is only known in closed form there); use numeric mode");
    const ExactMatrix ea = rationalize_matrix(bc.a(), "A");
    const ExactMatrix eb = rationalize_matrix(bc.b(), "B");
    GaussianRational ga;
    if (!GaussianRational::rationalize(a, kMaxDenominator, 1e-12, ga))
      throw ValidationError("exact mode: a is not a rational with small denominator");
    const ExactMatrix er = ea + ga * eb;
    const ExactJordanData ejd = jordan_form_exact(eb);
    const ExactLowEnergyExpansion ee = low_energy_expansion(ejd, er);
    const ExactMatrix sq = ee.s0 * ee.s0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (sq(i, j) != GaussianRational(i == j ? 1 : 0))
          throw NumericalError("exact S(0) is not an involution");
    out.jd = to_numeric(ejd);
    out.expansion = to_numeric(ee);
    out.j0 = to_numeric(eb);
    out.exact = true;
  } else {
    out.j0 = jost_matrix_zero(pot, bc, cfg);
    const Matrix r = r_matrix(pot, bc, a, cfg);
    const double scale = low_energy_scale(out.j0, r);
    out.eps_eig = 1e-8 * scale;
    out.eps_rank = 1e-10 * scale;
    out.jd = jordan_form(out.j0, JordanMode::numeric, out.eps_eig, out.eps_rank);
    out.expansion = low_energy_expansion(out.jd, r);
  }

  const Matrix& s0 = out.expansion.s0;
  const Matrix id = Matrix::Identity(n, n);
  out.involution_residual = (s0 * s0 - id).norm();
  out.unitarity_residual = (s0.adjoint() * s0 - id).norm();

  SolverConfig probe_cfg = cfg;
  probe_cfg.a = a;
  for (double k : opts.probes) out.probes.push_back({k, (smatrix(pot, bc, k, probe_cfg).s - s0).norm()});
  return out;
}

JostInverseAsymptotics jost_inverse_asymptotics(const LowEnergyExpansion& e, const JordanData& jd) {
  if (jd.mu == 0) return {guarded_inverse(jd.matrix, "J(0)"), 0};
  return {e.l_minus1, 1};
}

KernelBijection kernel_bijection(const Potential& pot, const BoundaryCondition& bc, double a, const Vector& u,
                                 double tol, const SolverConfig& cfg) {
  const Matrix j0 = jost_matrix_zero(pot, bc, cfg);
  if (u.size() != j0.cols()) throw ValidationError("vector size does not match the boundary condition");
  const double defect = (j0 * u).norm();
  if (defect > tol * std::max(1.0, j0.norm()) * u.norm()) {
    std::ostringstream os;
    os << "u is not in Ker J(0) (||J(0)u|| = " << defect << ")";
    throw ValidationError(os.str());
  }
  KernelBijection out;
  out.xi = r_matrix(pot, bc, a, cfg) * u;
  out.adjoint_residual = (j0.adjoint() * out.xi).norm();
  const double xm = pot.x_max();
  for (double x : {0.0, 0.5 * a, a, xm, 2.0 * xm + 1.0}) {
    const Vector lhs = regular_solution(pot, bc, 0.0, x, cfg).value * u;
    const Vector rhs = jost_solution(pot, 0.0, x, cfg).value * out.xi;
    out.solution_residual = std::max(out.solution_residual, (lhs - rhs).norm());
  }
  return out;
}

KernelCharacterization kernel_characterization(const Potential& pot, const BoundaryCondition& bc, const Vector& u,
                                               double tol, const SolverConfig& cfg) {
  const double xm = pot.x_max();
  const StateMatrix at_xm = regular_solution(pot, bc, 0.0, xm, cfg);
  const StateMatrix far = propagate(pot, 0.0, at_xm, xm + 1e6, cfg);
  KernelCharacterization out;
  out.phi_prime_limit = at_xm.deriv * u;
  out.in_kernel = out.phi_prime_limit.norm() <= tol * std::max(1.0, at_xm.deriv.norm()) * u.norm();
  out.growth = (far.value * u).norm() / std::max(1.0, (at_xm.value * u).norm());
  return out;
}

}  // namespace halfline
