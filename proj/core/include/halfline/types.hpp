#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "halfline/gaussian_rational.hpp"

namespace halfline {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using ExactMatrix = Eigen::Matrix<GaussianRational, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr Complex kI{0.0, 1.0};

enum class ErrorKind { validation, numerical, fixture_mismatch };

/// Base for all library errors. The kind selects the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::validation, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

inline Complex conj(const Complex& z) { return std::conj(z); }
inline bool is_exact_zero(const Complex& z) { return z == Complex{0.0, 0.0}; }
inline double pivot_magnitude(const Complex& z) { return std::abs(z); }
inline Complex to_complex(const Complex& z) { return z; }

ExactMatrix to_exact(const Matrix& m);
Matrix to_numeric(const ExactMatrix& m);

/// Conjugate transpose that works for both scalar types.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> adjoint_of(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(m.cols(), m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(j, i) = conj(m(i, j));
  return out;
}

}  // namespace halfline
