#include "halfline/bc.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "halfline/linalg.hpp"

namespace halfline {
namespace {

void require_square_pair(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows() || a.rows() == 0) {
    std::ostringstream os;
    os << "boundary matrices must be square and of equal size, got " << a.rows() << "x" << a.cols()
       << " and " << b.rows() << "x" << b.cols();
    throw ValidationError(os.str());
  }
}

// sin/cos of an angle with sub-ulp results flushed so Dirichlet and Neumann
// rows come out exact.
double flush(double v) { return std::abs(v) < 1e-15 ? 0.0 : v; }

std::string describe(const ValidationReport& report) {
  std::ostringstream os;
  os << "invalid boundary condition:";
  for (const auto& v : report.violations) os << " " << v.rule << " (residual " << v.residual << ")";
  return os.str();
}

}  // namespace

std::string to_string(Formulation f) {
  switch (f) {
    case Formulation::kostrykin_ab: return "kostrykin_ab";
    case Formulation::harmer_unitary: return "harmer_unitary";
    case Formulation::general_ab: return "general_ab";
    case Formulation::normalized: return "normalized";
  }
  return "general_ab";
}

Formulation formulation_from_string(const std::string& s) {
  if (s == "kostrykin_ab") return Formulation::kostrykin_ab;
  if (s == "harmer_unitary") return Formulation::harmer_unitary;
  if (s == "general_ab") return Formulation::general_ab;
  if (s == "normalized") return Formulation::normalized;
  throw ValidationError("unknown formulation '" + s + "'");
}

std::string to_string(UnitaryConvention c) {
  return c == UnitaryConvention::harmer ? "harmer" : "cosine_sine";
}

UnitaryConvention convention_from_string(const std::string& s) {
  if (s == "harmer") return UnitaryConvention::harmer;
  if (s == "cosine_sine") return UnitaryConvention::cosine_sine;
  throw ValidationError("unknown unitary convention '" + s + "'");
}

ValidationReport validate_ab(const Matrix& a, const Matrix& b) {
  require_square_pair(a, b);
  ValidationReport report;
  const Matrix gram = a.adjoint() * a + b.adjoint() * b;
  const double scale = std::max(1.0, linalg::op_norm(gram));

  const double sa = (a.adjoint() * b - b.adjoint() * a).norm();
  if (sa > kCheckTolerance * scale) report.violations.push_back({"selfadjoint", sa});

  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const double min_ev = es.eigenvalues()(0);
  if (min_ev <= kPosDefTolerance * linalg::op_norm(gram))
    report.violations.push_back({"positive_definite", min_ev});
  return report;
}

ValidationReport validate_kostrykin(const Matrix& a1, const Matrix& b1) {
  require_square_pair(a1, b1);
  ValidationReport report;
  const double scale = std::max(1.0, a1.norm() * b1.norm());
  const double sa = (a1 * b1.adjoint() - b1 * a1.adjoint()).norm();
  if (sa > kCheckTolerance * scale) report.violations.push_back({"selfadjoint", sa});

  Matrix stacked(a1.rows(), 2 * a1.cols());
  stacked << a1, b1;
  const Eigen::Index rank = linalg::numeric_rank(stacked, kRankTolerance);
  if (rank != a1.rows())
    report.violations.push_back({"rank", static_cast<double>(a1.rows() - rank)});
  return report;
}

BoundaryCondition BoundaryCondition::from_ab(Matrix a, Matrix b, Formulation formulation) {
  const ValidationReport report = validate_ab(a, b);
  if (!report.ok()) throw ValidationError(describe(report));
  Matrix e = linalg::hermitian_sqrt(a.adjoint() * a + b.adjoint() * b);
  return BoundaryCondition(std::move(a), std::move(b), std::move(e), formulation);
}

BoundaryCondition BoundaryCondition::from_kostrykin(const Matrix& a1, const Matrix& b1) {
  const ValidationReport report = validate_kostrykin(a1, b1);
  if (!report.ok()) throw ValidationError(describe(report));
  return from_ab(b1.adjoint(), -a1.adjoint(), Formulation::kostrykin_ab);
}

Matrix BoundaryCondition::e_inverse_squared() const {
  return (a_.adjoint() * a_ + b_.adjoint() * b_).inverse();
}

double BoundaryCondition::normalization_residual() const {
  const Matrix e2 = e_inverse_squared();
  const Eigen::Index n = a_.rows();
  const double r1 = (a_ * e2 * a_.adjoint() + b_ * e2 * b_.adjoint() - Matrix::Identity(n, n)).norm();
  const double r2 = (b_ * e2 * a_.adjoint() - a_ * e2 * b_.adjoint()).norm();
  return std::max(r1, r2);
}

UnitaryBC to_unitary(const BoundaryCondition& bc) {
  const Matrix& a = bc.a();
  const Matrix& b = bc.b();
  Matrix u = (a - kI * b) * bc.e_inverse_squared() * (a.adjoint() - kI * b.adjoint());
  return {std::move(u), UnitaryConvention::harmer};
}

BoundaryCondition from_unitary(const UnitaryBC& ubc) {
  const Matrix& u = ubc.u;
  if (u.rows() != u.cols() || u.rows() == 0) throw ValidationError("U must be a nonempty square matrix");
  const Eigen::Index n = u.rows();
  const Matrix id = Matrix::Identity(n, n);
  const double res = (u.adjoint() * u - id).norm();
  if (res > kCheckTolerance * std::max<double>(1.0, static_cast<double>(n))) {
    std::ostringstream os;
    os << "U is not unitary (||U^dag U - I|| = " << res << ")";
    throw ValidationError(os.str());
  }
  if (ubc.convention == UnitaryConvention::harmer)
    return BoundaryCondition::from_ab(0.5 * (u + id), 0.5 * kI * (u - id), Formulation::harmer_unitary);
  return BoundaryCondition::from_ab(0.5 * kI * (u - u.adjoint()), 0.5 * (u + u.adjoint()),
                                    Formulation::general_ab);
}

BoundaryCondition from_angles(std::span<const double> thetas) {
  if (thetas.empty()) throw ValidationError("angle list must be nonempty");
  const auto n = static_cast<Eigen::Index>(thetas.size());
  Matrix a = Matrix::Zero(n, n);
  Matrix b = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double t = thetas[static_cast<size_t>(j)];
    if (!(t > 0.0 && t <= std::numbers::pi)) {
      std::ostringstream os;
      os << "angle " << j << " = " << t << " outside (0, pi]";
      throw ValidationError(os.str());
    }
    a(j, j) = -flush(std::sin(t));
    b(j, j) = flush(std::cos(t));
  }
  return BoundaryCondition::from_ab(std::move(a), std::move(b), Formulation::general_ab);
}

BoundaryCondition normalize(const BoundaryCondition& bc) {
  const Matrix e_inv = bc.e().inverse();
  return BoundaryCondition::from_ab(bc.a() * e_inv, bc.b() * e_inv, Formulation::normalized);
}

double block_unitarity_residual(const BoundaryCondition& bc) {
  const Eigen::Index n = bc.n();
  Matrix c(2 * n, 2 * n);
  c << bc.b(), bc.a(), bc.a(), -bc.b();
  return (c.adjoint() * c - Matrix::Identity(2 * n, 2 * n)).norm();
}

BoundaryCondition gauge_transform(const BoundaryCondition& bc, const Matrix& d) {
  if (d.rows() != bc.n() || d.cols() != bc.n())
    throw ValidationError("gauge matrix has the wrong size");
  const double cond = linalg::condition_number(d);
  if (!(cond <= kGaugeConditionCap)) {
    std::ostringstream os;
    os << "gauge matrix is singular or ill-conditioned (cond = " << cond << ")";
    throw ValidationError(os.str());
  }
  return BoundaryCondition::from_ab(bc.a() * d.adjoint(), bc.b() * d.adjoint(), bc.formulation());
}

bool bc_subspace_equal(const BoundaryCondition& lhs, const BoundaryCondition& rhs) {
  if (lhs.n() != rhs.n()) return false;
  const Eigen::Index n = lhs.n();
  // Normalizing first puts both row blocks on the same scale.
  const BoundaryCondition l = normalize(lhs);
  const BoundaryCondition r = normalize(rhs);
  Matrix stacked(2 * n, 2 * n);
  stacked << -l.b().adjoint(), l.a().adjoint(), -r.b().adjoint(), r.a().adjoint();
  return linalg::numeric_rank(stacked, kRankTolerance) == n;
}

}  // namespace halfline
