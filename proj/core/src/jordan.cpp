#include "halfline/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace halfline {
namespace {

constexpr long long kMaxDenominator = 1000000;

template <class Scalar>
using Mat = linalg::Mat<Scalar>;

template <class Scalar>
Mat<Scalar> hcat(const Mat<Scalar>& l, const Mat<Scalar>& r) {
  Mat<Scalar> out(l.rows(), l.cols() + r.cols());
  if (l.cols() > 0) out.leftCols(l.cols()) = l;
  if (r.cols() > 0) out.rightCols(r.cols()) = r;
  return out;
}

template <class Scalar>
Mat<Scalar> matrix_power(const Mat<Scalar>& m, int p) {
  Mat<Scalar> out = Mat<Scalar>::Identity(m.rows(), m.cols());
  for (int i = 0; i < p; ++i) out = (out * m).eval();
  return out;
}

// Linear-algebra policy for the exact field.
struct ExactOps {
  using Scalar = GaussianRational;
  Mat<Scalar> null_space(const Mat<Scalar>& a, int /*power*/) const { return linalg::exact_null_space(a); }

  // Greedily picks `count` candidate columns that raise the rank of `base`.
  Mat<Scalar> extend(const Mat<Scalar>& base, const Mat<Scalar>& candidates, int count) const {
    Mat<Scalar> cur = base;
    Mat<Scalar> picked(base.rows(), 0);
    Eigen::Index rank = linalg::exact_rank(cur);
    for (Eigen::Index c = 0; c < candidates.cols() && picked.cols() < count; ++c) {
      Mat<Scalar> trial = hcat<Scalar>(cur, candidates.col(c));
      const Eigen::Index r = linalg::exact_rank(trial);
      if (r > rank) {
        cur = std::move(trial);
        rank = r;
        picked = hcat<Scalar>(picked, candidates.col(c));
      }
    }
    if (picked.cols() != count) throw NumericalError("exact Jordan chain selection failed");
    return picked;
  }
};

// Floating-point policy: SVD null spaces and pivoted-QR complement selection.
struct NumericOps {
  using Scalar = Complex;
  double eps_rank;
  double n_norm;  // ||M - lambda I||

  double threshold(int power) const { return eps_rank * std::pow(std::max(1.0, n_norm), std::max(0, power - 1)); }

  Matrix null_space(const Matrix& a, int power) const { return linalg::null_space(a, threshold(power)); }

  Matrix extend(const Matrix& base, const Matrix& candidates, int count) const {
    Matrix p = candidates;
    if (base.cols() > 0) {
      Eigen::JacobiSVD<Matrix> svd(base, Eigen::ComputeThinU);
      const auto& s = svd.singularValues();
      Eigen::Index r = 0;
      for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > eps_rank) ++r;
      const Matrix q = svd.matrixU().leftCols(r);
      p = candidates - q * (q.adjoint() * candidates);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(p);
    const auto& perm = qr.colsPermutation().indices();
    Matrix picked(p.rows(), count);
    for (int i = 0; i < count; ++i) {
      if (std::abs(qr.matrixQR()(i, i)) <= eps_rank)
        throw NumericalError("Jordan chain selection is ambiguous at the rank tolerance");
      Vector v = p.col(perm(i));
      for (int j = 0; j < i; ++j) v -= picked.col(j) * (picked.col(j).adjoint() * v)(0, 0);
      picked.col(i) = v / v.norm();
    }
    return picked;
  }
};

template <class Scalar>
struct BuiltChain {
  int length;
  Mat<Scalar> vectors;  // columns u_1 .. u_length
};

// Chains for one eigenvalue cluster of algebraic multiplicity `mult`.
template <class Ops>
std::vector<BuiltChain<typename Ops::Scalar>> build_chains(const Mat<typename Ops::Scalar>& m,
                                                           const typename Ops::Scalar& lambda, int mult,
                                                           const Ops& ops) {
  using Scalar = typename Ops::Scalar;
  const Eigen::Index n = m.rows();
  const Mat<Scalar> nmat = m - lambda * Mat<Scalar>::Identity(n, n);

  std::vector<Mat<Scalar>> kernels{Mat<Scalar>(n, 0)};
  int top = 0;
  for (int j = 1; j <= mult; ++j) {
    kernels.push_back(ops.null_space(matrix_power<Scalar>(nmat, j), j));
    const auto dim = static_cast<int>(kernels.back().cols());
    if (dim < static_cast<int>(kernels[j - 1].cols()) || dim > mult) break;
    if (dim == mult) {
      top = j;
      break;
    }
  }
  if (top == 0) {
    std::ostringstream os;
    os << "kernel dimensions of (M - lambda)^j never reach the multiplicity " << mult;
    throw NumericalError(os.str());
  }

  // c[j] = number of chains of length >= j.
  std::vector<int> c(static_cast<size_t>(top + 2), 0);
  for (int j = 1; j <= top; ++j)
    c[static_cast<size_t>(j)] = static_cast<int>(kernels[j].cols() - kernels[j - 1].cols());
  for (int j = 1; j < top; ++j)
    if (c[static_cast<size_t>(j)] < c[static_cast<size_t>(j + 1)])
      throw NumericalError("inconsistent Jordan staircase");

  struct Top {
    int length;
    Mat<Scalar> w;
  };
  std::vector<Top> tops;
  for (int j = top; j >= 1; --j) {
    Mat<Scalar> existing(n, 0);
    for (const auto& t : tops) existing = hcat<Scalar>(existing, matrix_power<Scalar>(nmat, t.length - j) * t.w);
    const int fresh = c[static_cast<size_t>(j)] - c[static_cast<size_t>(j + 1)];
    if (fresh <= 0) continue;
    const Mat<Scalar> base = hcat<Scalar>(kernels[j - 1], existing);
    const Mat<Scalar> picked = ops.extend(base, kernels[j], fresh);
    for (Eigen::Index i = 0; i < picked.cols(); ++i) tops.push_back({j, picked.col(i)});
  }

  std::vector<BuiltChain<Scalar>> chains;
  for (const auto& t : tops) {
    BuiltChain<Scalar> ch{t.length, Mat<Scalar>(n, t.length)};
    Mat<Scalar> v = t.w;
    for (int i = t.length - 1; i >= 0; --i) {
      ch.vectors.col(i) = v;
      v = (nmat * v).eval();
    }
    chains.push_back(std::move(ch));
  }
  // Shorter chains first; creation order breaks ties.
  std::stable_sort(chains.begin(), chains.end(),
                   [](const auto& l, const auto& r) { return l.length < r.length; });
  return chains;
}

template <class Scalar>
struct Cluster {
  Scalar lambda;
  int mult;
  bool zero;
};

template <class Scalar>
void assemble(BasicJordanData<Scalar>& jd, const std::vector<Cluster<Scalar>>& clusters,
              const std::vector<std::vector<BuiltChain<Scalar>>>& per_cluster) {
  const Eigen::Index n = jd.matrix.rows();
  jd.smat = Mat<Scalar>(n, n);
  Eigen::Index col = 0;
  for (size_t ci = 0; ci < clusters.size(); ++ci) {
    for (const auto& ch : per_cluster[ci]) {
      jd.smat.middleCols(col, ch.length) = ch.vectors;
      col += ch.length;
      jd.chains.push_back({clusters[ci].lambda, ch.length});
      if (clusters[ci].zero) {
        ++jd.mu;
        jd.nu += ch.length;
      }
    }
  }
  if (col != n) throw NumericalError("Jordan chains do not span the space");
  jd.kappa = static_cast<int>(jd.chains.size());
}

}  // namespace

std::string to_string(JordanMode m) { return m == JordanMode::exact ? "exact" : "numeric"; }

JordanMode jordan_mode_from_string(const std::string& s) {
  if (s == "exact") return JordanMode::exact;
  if (s == "numeric") return JordanMode::numeric;
  throw ValidationError("unknown mode '" + s + "' (expected exact|numeric)");
}

ExactJordanData jordan_form_exact(const ExactMatrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("Jordan form needs a square matrix");
  const Eigen::Index n = m.rows();
  const Matrix mn = to_numeric(m);
  const double scale = std::max(1.0, mn.norm());

  // Candidate eigenvalues from floating point, snapped to Gaussian rationals.
  Eigen::ComplexEigenSolver<Matrix> es(mn, false);
  std::vector<GaussianRational> candidates;
  for (Eigen::Index i = 0; i < n; ++i) {
    GaussianRational g;
    Complex z = es.eigenvalues()(i);
    if (std::abs(z) < 1e-6 * scale) z = 0.0;
    if (!GaussianRational::rationalize(z, kMaxDenominator, 1e-5, g)) continue;
    if (std::find(candidates.begin(), candidates.end(), g) == candidates.end()) candidates.push_back(g);
  }

  const ExactMatrix id = ExactMatrix::Identity(n, n);
  std::vector<Cluster<GaussianRational>> clusters;
  int total = 0;
  for (const auto& lam : candidates) {
    const auto mult =
        static_cast<int>(linalg::exact_null_space<GaussianRational>(matrix_power<GaussianRational>(m - lam * id, static_cast<int>(n))).cols());
    if (mult == 0) continue;
    clusters.push_back({lam, mult, lam.is_zero()});
    total += mult;
  }
  if (total != n)
    throw ValidationError("exact mode needs Gaussian-rational eigenvalues; use --mode numeric for this matrix");

  std::stable_sort(clusters.begin(), clusters.end(), [](const auto& l, const auto& r) {
    if (l.zero != r.zero) return l.zero;
    const Complex a = l.lambda.to_complex(), b = r.lambda.to_complex();
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  ExactJordanData jd;
  jd.matrix = m;
  jd.mode = JordanMode::exact;
  std::vector<std::vector<BuiltChain<GaussianRational>>> per_cluster;
  for (const auto& cl : clusters) per_cluster.push_back(build_chains(m, cl.lambda, cl.mult, ExactOps{}));
  assemble(jd, clusters, per_cluster);
  auto inv = linalg::try_inverse<GaussianRational>(jd.smat);
  if (!inv) throw NumericalError("exact Jordan basis is singular");
  jd.sinv = std::move(*inv);
  return jd;
}

JordanData jordan_form(const Matrix& m, JordanMode mode, double eps_eig, double eps_rank) {
  if (m.rows() != m.cols()) throw ValidationError("Jordan form needs a square matrix");
  if (mode == JordanMode::exact) {
    ExactMatrix em(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        if (!GaussianRational::rationalize(m(i, j), kMaxDenominator, 1e-13, em(i, j))) {
          std::ostringstream os;
          os << "entry (" << i << "," << j << ") = " << m(i, j)
             << " is not a Gaussian rational with small denominator; use numeric mode";
          throw ValidationError(os.str());
        }
    return to_numeric(jordan_form_exact(em));
  }

  const Eigen::Index n = m.rows();
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  std::vector<Complex> eig(es.eigenvalues().data(), es.eigenvalues().data() + n);

  // Strict clustering at eps_eig; |lambda| <= eps_eig counts as zero.
  struct Group {
    std::vector<Complex> members;
    bool zero;
    Complex center() const {
      if (zero) return 0.0;
      Complex s = 0.0;
      for (auto z : members) s += z;
      return s / static_cast<double>(members.size());
    }
  };
  std::vector<Group> groups;
  Group zero_group{{}, true};
  std::vector<Complex> rest;
  for (auto z : eig) (std::abs(z) <= eps_eig ? zero_group.members : rest).push_back(z);
  std::sort(rest.begin(), rest.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (auto z : rest) {
    bool placed = false;
    for (auto& g : groups)
      for (auto w : g.members)
        if (!placed && std::abs(z - w) <= eps_eig) {
          g.members.push_back(z);
          placed = true;
        }
    if (!placed) groups.push_back({{z}, false});
  }
  if (!zero_group.members.empty()) groups.insert(groups.begin(), zero_group);

  auto multiplicity_confirmed = [&](Complex lam, int mult) {
    const Matrix nm = m - lam * Matrix::Identity(n, n);
    const NumericOps ops{eps_rank, linalg::op_norm(nm)};
    return linalg::null_space(matrix_power<Complex>(nm, mult), ops.threshold(mult)).cols() == mult;
  };

  // Defective eigenvalues split by roughly sqrt(round-off); merge nearby groups
  // when the combined multiplicity is confirmed by a rank test.
  // All neighbours of a group are tried together first, then one at a time.
  const double merge_radius = 1e4 * eps_eig;
  auto try_merge = [&](size_t i, const std::vector<size_t>& others) {
    Group g = groups[i];
    for (size_t j : others) {
      g.zero = g.zero || groups[j].zero;
      g.members.insert(g.members.end(), groups[j].members.begin(), groups[j].members.end());
    }
    if (!multiplicity_confirmed(g.center(), static_cast<int>(g.members.size()))) return false;
    groups[i] = std::move(g);
    for (auto it = others.rbegin(); it != others.rend(); ++it)
      groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(*it));
    return true;
  };
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t i = 0; i < groups.size() && !merged; ++i) {
      std::vector<size_t> near;
      for (size_t j = i + 1; j < groups.size(); ++j)
        if (std::abs(groups[i].center() - groups[j].center()) <= merge_radius) near.push_back(j);
      if (near.size() > 1 && try_merge(i, near)) {
        merged = true;
        break;
      }
      for (size_t j : near)
        if (try_merge(i, {j})) {
          merged = true;
          break;
        }
    }
  }
  std::stable_sort(groups.begin(), groups.end(), [](const Group& l, const Group& r) {
    if (l.zero != r.zero) return l.zero;
    const Complex a = l.center(), b = r.center();
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  std::vector<Cluster<Complex>> clusters;
  for (const auto& g : groups) {
    const int mult = static_cast<int>(g.members.size());
    if (!multiplicity_confirmed(g.center(), mult)) {
      std::ostringstream os;
      os << "Jordan structure ambiguous: eigenvalue cluster near " << g.center() << " of size " << mult
         << " is not confirmed by rank tests (eps_eig = " << eps_eig << ", eps_rank = " << eps_rank << ")";
      throw NumericalError(os.str());
    }
    clusters.push_back({g.center(), mult, g.zero});
  }

  JordanData jd;
  jd.matrix = m;
  jd.mode = JordanMode::numeric;
  std::vector<std::vector<BuiltChain<Complex>>> per_cluster;
  for (const auto& cl : clusters) {
    const Matrix nm = m - cl.lambda * Matrix::Identity(n, n);
    per_cluster.push_back(build_chains(m, cl.lambda, cl.mult, NumericOps{eps_rank, linalg::op_norm(nm)}));
  }
  assemble(jd, clusters, per_cluster);
  const double cond = linalg::condition_number(jd.smat);
  if (!(cond < 1e12)) {
    std::ostringstream os;
    os << "Jordan basis is numerically singular (cond = " << cond << ")";
    throw NumericalError(os.str());
  }
  jd.sinv = jd.smat.inverse();
  return jd;
}

JordanData to_numeric(const ExactJordanData& jd) {
  JordanData out;
  out.matrix = to_numeric(jd.matrix);
  out.smat = to_numeric(jd.smat);
  out.sinv = to_numeric(jd.sinv);
  for (const auto& c : jd.chains) out.chains.push_back({c.eigenvalue.to_complex(), c.length});
  out.mu = jd.mu;
  out.nu = jd.nu;
  out.kappa = jd.kappa;
  out.mode = JordanMode::exact;
  return out;
}

JordanData rescale_chains(const JordanData& jd, std::span<const Complex> factors) {
  if (factors.size() != jd.chains.size()) throw ValidationError("need one factor per Jordan chain");
  JordanData out = jd;
  for (size_t a = 0; a < jd.chains.size(); ++a) {
    if (factors[a] == Complex{0.0, 0.0}) throw ValidationError("chain factors must be nonzero");
    const Eigen::Index off = jd.chain_offset(a);
    const int len = jd.chains[a].length;
    out.smat.middleCols(off, len) *= factors[a];
    out.sinv.middleRows(off, len) /= factors[a];
  }
  return out;
}

JordanResiduals jordan_residuals(const JordanData& jd) {
  const Eigen::Index n = jd.n();
  JordanResiduals r;
  r.biorthogonality = (jd.sinv * jd.smat - Matrix::Identity(n, n)).norm();
  r.similarity = (jd.sinv * jd.matrix * jd.smat - jd.jordan_form()).norm();
  for (size_t a = 0; a < jd.chains.size(); ++a) {
    const Eigen::Index off = jd.chain_offset(a);
    const Matrix nm = jd.matrix - jd.chains[a].eigenvalue * Matrix::Identity(n, n);
    for (int j = 0; j < jd.chains[a].length; ++j) {
      Vector res = nm * jd.smat.col(off + j);
      if (j > 0) res -= jd.smat.col(off + j - 1);
      r.chain_relations = std::max(r.chain_relations, res.norm());
    }
  }
  return r;
}

bool jordan_exact_check(const ExactJordanData& jd) {
  const Eigen::Index n = jd.n();
  const ExactMatrix id = ExactMatrix::Identity(n, n);
  const ExactMatrix prod = jd.sinv * jd.smat;
  const ExactMatrix sim = jd.sinv * jd.matrix * jd.smat;
  const ExactMatrix jf = jd.jordan_form();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (prod(i, j) != id(i, j) || sim(i, j) != jf(i, j)) return false;
  return true;
}

}  // namespace halfline
