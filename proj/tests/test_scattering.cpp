#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "halfline/scattering.hpp"
#include "support/test_support.hpp"

using namespace halfline;
using testing_support::PiecewiseOracle;
using testing_support::random_bc;
using testing_support::random_gauge;
using testing_support::random_two_piece;
using testing_support::rel_diff;

namespace {

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

Potential scalar_well(double v0, double width) {
  return Potential::make(1, {{0.0, width, Matrix::Constant(1, 1, -v0)}});
}

}  // namespace

TEST(Scattering, FreeJostMatchesClosedForm) {
  std::mt19937 rng(41);
  const auto pot = Potential::zero(3);
  for (int trial = 0; trial < 5; ++trial) {
    const auto bc = random_bc(rng, 3);
    for (Complex k : {Complex(0.8, 0), Complex(0.3, 0.5)}) {
      const auto closed = free_closed_forms(bc, k);
      EXPECT_LT((closed.j - (bc.b() - kI * k * bc.a())).norm(), 1e-15);
      EXPECT_LT(rel_diff(jost_matrix(pot, bc, k, 0.0).j, closed.j), 1e-13);
    }
    const auto closed = free_closed_forms(bc, 1.2);
    ASSERT_TRUE(closed.s.has_value());
    EXPECT_LT(rel_diff(smatrix(pot, bc, 1.2).s, *closed.s), 1e-12);
  }
}

TEST(Scattering, FreeDirichletNeumannRobin) {
  const auto pot = Potential::zero(1);
  const auto dir = from_angles(std::vector<double>{std::numbers::pi});
  const auto neu = from_angles(std::vector<double>{std::numbers::pi / 2});
  const double theta = 1.1;
  const auto rob = from_angles(std::vector<double>{theta});
  for (double k : {0.1, 1.0, 4.0}) {
    EXPECT_LT(std::abs(smatrix(pot, dir, k).s(0, 0) + 1.0), 1e-14);
    EXPECT_LT(std::abs(smatrix(pot, neu, k).s(0, 0) - 1.0), 1e-14);
    const Complex expected =
        -(std::cos(theta) - kI * k * std::sin(theta)) / (std::cos(theta) + kI * k * std::sin(theta));
    EXPECT_LT(std::abs(smatrix(pot, rob, k).s(0, 0) - expected), 1e-14);
  }
}

TEST(Scattering, FreeSingularJostHasNoClosedS) {
  // Neumann: J(k) = ik I vanishes at k = 0.
  const auto neu = from_angles(std::vector<double>{std::numbers::pi / 2});
  EXPECT_FALSE(free_closed_forms(neu, 0.0).s.has_value());
}

TEST(Scattering, JostMatchesPiecewiseOracle) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pot = random_two_piece(rng, 3, 2.0);
    const auto bc = random_bc(rng, 3);
    const PiecewiseOracle oracle(pot);
    for (Complex k : {Complex(0.6, 0), Complex(2.0, 0), Complex(0.4, 0.3)}) {
      const auto ev = jost_matrix(pot, bc, k, 0.5 * pot.x_max());
      EXPECT_LT(rel_diff(ev.j, oracle.jost_matrix(bc, k)), 1e-9);
      EXPECT_LT(ev.consistency, 1e-9 * std::max(1.0, ev.j.norm()));
    }
    EXPECT_LT(rel_diff(smatrix(pot, bc, 0.9).s, oracle.smatrix(bc, 0.9)), 1e-8);
  }
}

TEST(Scattering, JostAtZeroRoutesAgree) {
  std::mt19937 rng(43);
  const auto pot = random_two_piece(rng, 2, 1.5);
  const auto bc = random_bc(rng, 2);
  EXPECT_LT(rel_diff(jost_matrix_zero(pot, bc), jost_matrix(pot, bc, 0.0, pot.x_max()).j), 1e-10);
}

TEST(Scattering, UnitarityAndReciprocity) {
  std::mt19937 rng(44);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pot = random_two_piece(rng, 3, 2.0);
    const auto bc = random_bc(rng, 3);
    for (double k : {0.3, 1.0, 3.5}) {
      const auto sp = smatrix(pot, bc, k);
      const auto sm = smatrix(pot, bc, -k);
      EXPECT_LT(sp.unitarity_residual, 1e-9);
      EXPECT_LT((sp.s.adjoint() * sp.s - identity(3)).norm(), 1e-9);
      EXPECT_LT((sm.s * sp.s - identity(3)).norm(), 1e-9);
      EXPECT_LT((sm.s - sp.s.adjoint()).norm(), 1e-9);
      EXPECT_GT(sp.det_j_abs, 0.0);
    }
  }
}

TEST(Scattering, JLIdentity) {
  std::mt19937 rng(45);
  const auto pot = random_two_piece(rng, 3, 1.5);
  const auto bc = gauge_transform(random_bc(rng, 3), random_gauge(rng, 3));
  for (double k : {0.4, 1.7}) {
    const Matrix j = jost_matrix(pot, bc, k, pot.x_max()).j;
    const Matrix l = l_matrix(pot, bc, k);
    EXPECT_LT((j * l.adjoint() - l * j.adjoint() + 2.0 * kI * k * identity(3)).norm(), 1e-9);
  }
}

TEST(Scattering, PMatrixIsIkToLeadingOrder) {
  const auto free = Potential::zero(2);
  EXPECT_LT((p_matrix(free, 0.7, 0.0) - 0.7 * kI * identity(2)).norm(), 1e-15);
  std::mt19937 rng(46);
  const auto pot = random_two_piece(rng, 2, 1.5);
  const double a = 0.5 * pot.x_max();
  auto ratio = [&](double k) { return (p_matrix(pot, k, a) / (kI * k) - identity(2)).norm(); };
  const double r1 = ratio(1e-1);
  const double r2 = ratio(1e-2);
  const double r3 = ratio(1e-3);
  EXPECT_LT(r2, r1 / 5.0);
  EXPECT_LT(r3, r2 / 5.0);
}

TEST(Scattering, LogDerivativeSlope) {
  std::mt19937 rng(47);
  const auto pot = random_two_piece(rng, 2, 1.5);
  const double a = 0.3 * pot.x_max();
  const double h = 1e-4;
  const Matrix gp = log_derivative(pot, h, a, LogDerivativeMode::value);
  const Matrix gm = log_derivative(pot, -h, a, LogDerivativeMode::value);
  const Matrix f0inv = jost_solution(pot, 0.0, a).value.inverse();
  const Matrix expected = kI * f0inv.adjoint() * f0inv;
  EXPECT_LT(rel_diff((gp - gm) / (2.0 * h), expected), 1e-4);
  const Matrix d = log_derivative(pot, 0.8, a, LogDerivativeMode::derivative);
  const Matrix v = log_derivative(pot, 0.8, a, LogDerivativeMode::value);
  EXPECT_LT((d * v - identity(2)).norm(), 1e-10);
}

TEST(Scattering, JostDecompositionSumsToJ) {
  std::mt19937 rng(48);
  for (int trial = 0; trial < 3; ++trial) {
    const auto pot = random_two_piece(rng, 3, 1.5);
    const auto bc = random_bc(rng, 3);
    for (Complex k : {Complex(0.9, 0), Complex(0.2, 0.6)}) {
      for (double a : {0.0, 0.5 * pot.x_max(), pot.x_max()}) {
        const auto d = jost_decomposition(pot, bc, k, a);
        const Matrix j = jost_matrix(pot, bc, k, pot.x_max()).j;
        EXPECT_LT(rel_diff(d.t1 + d.t2, j), 1e-9);
      }
    }
  }
}

TEST(Scattering, GaugeInvariance) {
  std::mt19937 rng(49);
  const auto pot = random_two_piece(rng, 3, 1.5);
  const auto bc = random_bc(rng, 3);
  const auto g = gauge_transform(bc, random_gauge(rng, 3));
  for (double k : {0.5, 2.0}) EXPECT_LT((smatrix(pot, bc, k).s - smatrix(pot, g, k).s).norm(), 1e-9);
}

TEST(Scattering, RejectsZeroMomentum) {
  const auto bc = from_angles(std::vector<double>{1.0});
  EXPECT_THROW(smatrix(Potential::zero(1), bc, 0.0), ValidationError);
}

TEST(Scattering, RejectsLowerHalfPlane) {
  const auto bc = from_angles(std::vector<double>{1.0});
  EXPECT_THROW(jost_matrix(Potential::zero(1), bc, Complex(1.0, -0.5), 0.0), ValidationError);
}

TEST(Scattering, ScalarDirichletSquareWellPhaseShift) {
  const double v0 = 2.0;
  const auto pot = scalar_well(v0, 1.0);
  for (double k : {0.3, 1.0, 2.2}) {
    const double q = std::sqrt(k * k + v0);
    const double delta = std::atan2(k * std::tan(q), q) - k;
    const Complex expected = std::exp(2.0 * kI * delta);
    EXPECT_LT(std::abs(scalar_smatrix(pot, std::numbers::pi, k) - expected), 1e-9);
  }
}

TEST(Scattering, ScalarConventionSigns) {
  const auto pot = scalar_well(1.3, 0.8);
  for (double k : {0.4, 1.5}) {
    const auto dir = from_angles(std::vector<double>{std::numbers::pi});
    EXPECT_LT(std::abs(scalar_smatrix(pot, std::numbers::pi, k) + smatrix(pot, dir, k).s(0, 0)), 1e-10);
    const double theta = 0.9;
    const auto rob = from_angles(std::vector<double>{theta});
    EXPECT_LT(std::abs(scalar_smatrix(pot, theta, k) - smatrix(pot, rob, k).s(0, 0)), 1e-10);
    const Complex f = jost_solution(pot, k, 0.0).value(0, 0);
    EXPECT_LT(std::abs(scalar_jost_function(pot, std::numbers::pi, k) - f), 1e-12);
  }
}
