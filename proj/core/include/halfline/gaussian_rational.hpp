#pragma once

#include <complex>
#include <ostream>
#include <string>

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

namespace halfline {

using Rational = boost::multiprecision::cpp_rational;

/// Exact complex number p + i q with p, q rational.
///
/// Used by the exact low-energy pipeline, where the zero-energy Jost matrix
/// and R are known in closed form and the Jordan structure must be decided
/// without rounding.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(int re) : re_(re) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im)) {}

  /// Exact binary value of a double (every finite double is a dyadic rational).
  static GaussianRational from_double(std::complex<double> z);

  /// Nearest rational with denominator <= max_den via continued fractions,
  /// applied to both parts. Returns false if either part misses by more than
  /// rel_tol * max(1, |z|).
  static bool rationalize(std::complex<double> z, long long max_den, double rel_tol,
                          GaussianRational& out);

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  GaussianRational conj() const { return {re_, -im_}; }
  Rational norm2() const { return re_ * re_ + im_ * im_; }
  std::complex<double> to_complex() const;
  double magnitude() const { return std::abs(to_complex()); }
  std::string to_string() const;

  GaussianRational operator-() const { return {-re_, -im_}; }
  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }
  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
    return os << z.to_string();
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

inline const GaussianRational kImagUnit{Rational(0), Rational(1)};

// Helpers with the same names as the std::complex overloads, so generic code
// can call them unqualified for either scalar.
inline GaussianRational conj(const GaussianRational& z) { return z.conj(); }
inline bool is_exact_zero(const GaussianRational& z) { return z.is_zero(); }
inline double pivot_magnitude(const GaussianRational& z) { return z.is_zero() ? 0.0 : 1.0 + z.magnitude(); }
inline std::complex<double> to_complex(const GaussianRational& z) { return z.to_complex(); }

}  // namespace halfline

namespace Eigen {

template <>
struct NumTraits<halfline::GaussianRational> : GenericNumTraits<halfline::GaussianRational> {
  using Real = halfline::GaussianRational;
  using NonInteger = halfline::GaussianRational;
  using Nested = halfline::GaussianRational;
  using Literal = halfline::GaussianRational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 32
  };
  static inline Real epsilon() { return 0; }
  static inline Real dummy_precision() { return 0; }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
