#include <cmath>

#include <gtest/gtest.h>

#include "halfline/linalg.hpp"
#include "halfline/types.hpp"

using halfline::ExactMatrix;
using halfline::GaussianRational;
using halfline::Rational;

TEST(GaussianRational, FieldArithmetic) {
  const GaussianRational a(Rational(1, 2), Rational(3));
  const GaussianRational b(Rational(-2), Rational(1, 3));
  const GaussianRational prod = a * b;
  EXPECT_EQ(prod, GaussianRational(Rational(-1) - Rational(1), Rational(1, 6) - Rational(6)));
  EXPECT_EQ((prod / b), a);
  EXPECT_EQ(a - a, GaussianRational(0));
  EXPECT_EQ(a.conj(), GaussianRational(Rational(1, 2), Rational(-3)));
  EXPECT_EQ(halfline::kImagUnit * halfline::kImagUnit, GaussianRational(-1));
}

TEST(GaussianRational, FromDoubleIsExact) {
  const auto g = GaussianRational::from_double({0.1, -0.375});
  EXPECT_EQ(g.imag(), Rational(-3, 8));
  EXPECT_EQ(g.to_complex(), std::complex<double>(0.1, -0.375));
  EXPECT_NE(g.real(), Rational(1, 10));
}

TEST(GaussianRational, RationalizeRecoversSmallDenominators) {
  GaussianRational g;
  ASSERT_TRUE(GaussianRational::rationalize({1.0 / 3.0, -2.0 / 7.0}, 1000000, 1e-12, g));
  EXPECT_EQ(g, GaussianRational(Rational(1, 3), Rational(-2, 7)));
  EXPECT_FALSE(GaussianRational::rationalize({std::sqrt(2.0), 0.0}, 1000, 1e-12, g));
}

TEST(GaussianRational, ExactInverseOfEigenMatrix) {
  ExactMatrix m(2, 2);
  m << GaussianRational(1), halfline::kImagUnit, GaussianRational(Rational(1, 2)), GaussianRational(3);
  const auto inv = halfline::linalg::try_inverse<GaussianRational>(m);
  ASSERT_TRUE(inv.has_value());
  const ExactMatrix id = m * *inv;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_EQ(id(i, j), GaussianRational(i == j ? 1 : 0));
}

TEST(GaussianRational, ExactNullSpaceAndRank) {
  ExactMatrix m(2, 3);
  m << GaussianRational(1), GaussianRational(2), GaussianRational(3), GaussianRational(2), GaussianRational(4),
      GaussianRational(6);
  EXPECT_EQ(halfline::linalg::exact_rank(m), 1);
  const ExactMatrix ns = halfline::linalg::exact_null_space(m);
  ASSERT_EQ(ns.cols(), 2);
  const ExactMatrix zero = m * ns;
  for (Eigen::Index i = 0; i < zero.rows(); ++i)
    for (Eigen::Index j = 0; j < zero.cols(); ++j) EXPECT_TRUE(zero(i, j).is_zero());
}

TEST(GaussianRational, SingularMatrixHasNoInverse) {
  ExactMatrix m = ExactMatrix::Zero(2, 2);
  m(0, 0) = GaussianRational(1);
  EXPECT_FALSE(halfline::linalg::try_inverse<GaussianRational>(m).has_value());
}
