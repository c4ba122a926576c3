#include "halfline/gaussian_rational.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace halfline {
namespace {

Rational exact_from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("non-finite value has no rational form");
  int exp = 0;
  double mant = std::frexp(x, &exp);
  // 53 bits of mantissa as an integer, then scale by 2^(exp-53).
  auto m = static_cast<long long>(std::ldexp(mant, 53));
  Rational r(m);
  int shift = exp - 53;
  boost::multiprecision::cpp_int pow2 = 1;
  pow2 <<= std::abs(shift);
  if (shift >= 0) return r * Rational(pow2);
  return r / Rational(pow2);
}

// Best rational approximation with bounded denominator (convergents only).
bool continued_fraction(double x, long long max_den, Rational& out) {
  long long h_prev = 1, h = static_cast<long long>(std::floor(x));
  long long k_prev = 0, k = 1;
  double frac = x - std::floor(x);
  for (int iter = 0; iter < 64 && frac > 1e-15; ++iter) {
    double inv = 1.0 / frac;
    auto a = static_cast<long long>(std::floor(inv));
    frac = inv - static_cast<double>(a);
    if (a > max_den) break;
    long long h_next = a * h + h_prev;
    long long k_next = a * k + k_prev;
    if (k_next > max_den) break;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  out = Rational(h) / Rational(k);
  return true;
}

}  // namespace

GaussianRational GaussianRational::from_double(std::complex<double> z) {
  return {exact_from_double(z.real()), exact_from_double(z.imag())};
}

bool GaussianRational::rationalize(std::complex<double> z, long long max_den, double rel_tol,
                                   GaussianRational& out) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  Rational re, im;
  continued_fraction(z.real(), max_den, re);
  continued_fraction(z.imag(), max_den, im);
  GaussianRational cand(re, im);
  const double scale = std::max(1.0, std::abs(z));
  if (std::abs(cand.to_complex() - z) > rel_tol * scale) return false;
  out = std::move(cand);
  return true;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  const Rational den = o.norm2();
  if (den == 0) throw std::domain_error("GaussianRational division by zero");
  Rational r = (re_ * o.re_ + im_ * o.im_) / den;
  im_ = (im_ * o.re_ - re_ * o.im_) / den;
  re_ = std::move(r);
  return *this;
}

std::complex<double> GaussianRational::to_complex() const {
  return {re_.convert_to<double>(), im_.convert_to<double>()};
}

std::string GaussianRational::to_string() const {
  std::ostringstream os;
  if (im_ == 0) {
    os << re_;
  } else if (re_ == 0) {
    os << im_ << "i";
  } else {
    os << re_ << (im_ > 0 ? "+" : "") << im_ << "i";
  }
  return os.str();
}

}  // namespace halfline
