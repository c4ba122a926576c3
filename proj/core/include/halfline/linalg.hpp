#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "halfline/types.hpp"

namespace halfline::linalg {

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Gauss-Jordan inverse with partial pivoting on pivot_magnitude().
/// Exact for GaussianRational, ordinary LU-quality for Complex.
/// Returns nullopt when a pivot column is exactly zero (or below tiny for
/// floating point).
template <class Scalar>
std::optional<Mat<Scalar>> try_inverse(const Mat<Scalar>& m, double tiny = 0.0) {
  const Eigen::Index n = m.rows();
  Mat<Scalar> work = m;
  Mat<Scalar> inv = Mat<Scalar>::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = -1;
    double best = tiny;
    for (Eigen::Index r = col; r < n; ++r) {
      const double mag = pivot_magnitude(work(r, col));
      if (mag > best && !is_exact_zero(work(r, col))) {
        best = mag;
        piv = r;
      }
    }
    if (piv < 0) return std::nullopt;
    if (piv != col) {
      work.row(piv).swap(work.row(col));
      inv.row(piv).swap(inv.row(col));
    }
    const Scalar p = work(col, col);
    for (Eigen::Index j = 0; j < n; ++j) {
      work(col, j) = work(col, j) / p;
      inv(col, j) = inv(col, j) / p;
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      if (r == col || is_exact_zero(work(r, col))) continue;
      const Scalar f = work(r, col);
      for (Eigen::Index j = 0; j < n; ++j) {
        work(r, j) -= f * work(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

/// Reduced row echelon form over an exact field. pivots receives the pivot
/// column of each nonzero row, in order.
template <class Scalar>
Mat<Scalar> rref(Mat<Scalar> m, std::vector<Eigen::Index>& pivots) {
  pivots.clear();
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index piv = -1;
    for (Eigen::Index r = row; r < m.rows(); ++r)
      if (!is_exact_zero(m(r, col))) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != row) m.row(piv).swap(m.row(row));
    const Scalar p = m(row, col);
    for (Eigen::Index j = col; j < m.cols(); ++j) m(row, j) = m(row, j) / p;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == row || is_exact_zero(m(r, col))) continue;
      const Scalar f = m(r, col);
      for (Eigen::Index j = col; j < m.cols(); ++j) m(r, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return m;
}

/// Exact null-space basis (columns), one vector per free column of the RREF.
template <class Scalar>
Mat<Scalar> exact_null_space(const Mat<Scalar>& m) {
  std::vector<Eigen::Index> pivots;
  const Mat<Scalar> r = rref(m, pivots);
  std::vector<bool> is_pivot(static_cast<size_t>(m.cols()), false);
  for (auto p : pivots) is_pivot[static_cast<size_t>(p)] = true;
  std::vector<Eigen::Index> free_cols;
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    if (!is_pivot[static_cast<size_t>(c)]) free_cols.push_back(c);
  Mat<Scalar> basis = Mat<Scalar>::Zero(m.cols(), static_cast<Eigen::Index>(free_cols.size()));
  for (size_t k = 0; k < free_cols.size(); ++k) {
    const Eigen::Index fc = free_cols[k];
    basis(fc, static_cast<Eigen::Index>(k)) = Scalar(1);
    for (size_t i = 0; i < pivots.size(); ++i)
      basis(pivots[i], static_cast<Eigen::Index>(k)) = -r(static_cast<Eigen::Index>(i), fc);
  }
  return basis;
}

template <class Scalar>
Eigen::Index exact_rank(const Mat<Scalar>& m) {
  std::vector<Eigen::Index> pivots;
  rref(m, pivots);
  return static_cast<Eigen::Index>(pivots.size());
}

// Floating-point helpers ----------------------------------------------------

/// Numerical rank with threshold rel_tol * largest singular value.
Eigen::Index numeric_rank(const Matrix& m, double rel_tol);

/// Rank with an absolute singular-value threshold.
Eigen::Index numeric_rank_abs(const Matrix& m, double abs_tol);

/// Orthonormal null-space basis: right singular vectors with sigma <= abs_tol.
Matrix null_space(const Matrix& m, double abs_tol);

/// 2-norm condition number; +inf for singular input.
double condition_number(const Matrix& m);

/// Principal square root of a Hermitian positive definite matrix.
Matrix hermitian_sqrt(const Matrix& h);

/// Solve X * m = rhs for X by LU on the transposed system.
Matrix right_solve(const Matrix& m, const Matrix& rhs);

double op_norm(const Matrix& m);

}  // namespace halfline::linalg
