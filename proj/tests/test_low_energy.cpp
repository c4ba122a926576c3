#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "halfline/fixtures.hpp"
#include "halfline/low_energy.hpp"
#include "halfline/scattering.hpp"
#include "support/test_support.hpp"

using namespace halfline;
using testing_support::random_bc;
using testing_support::random_gauge;
using testing_support::random_matrix;
using testing_support::random_two_piece;
using testing_support::random_unitary;
using testing_support::rel_diff;

namespace {

Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

BoundaryCondition fixture_bc(const ExampleFixture& f) {
  return BoundaryCondition::from_ab(to_numeric(f.a), to_numeric(f.b));
}

Matrix nilpotent(const std::vector<int>& lengths) {
  int nu = 0;
  for (int l : lengths) nu += l;
  Matrix m = Matrix::Zero(nu, nu);
  int off = 0;
  for (int l : lengths) {
    for (int i = 0; i + 1 < l; ++i) m(off + i, off + i + 1) = 1.0;
    off += l;
  }
  return m;
}

/// Scalar depth v0 of V = -v0 on [0, 1] where f(0, 0) vanishes, by bisection on
/// the solver's zero-energy Jost solution.
double tuned_resonance_depth() {
  auto f00 = [](double v0) {
    const auto pot = Potential::make(1, {{0.0, 1.0, Matrix::Constant(1, 1, -v0)}});
    return jost_solution(pot, 0.0, 0.0).value(0, 0).real();
  };
  double lo = 2.0, hi = 3.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f00(lo) * f00(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Two channels, unitarily mixed: a tuned resonance in one, a generic well in the other.
Potential mixed_resonance(const Matrix& q, double v0) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = -v0;
  d(1, 1) = -1.0;
  return Potential::make(2, {{0.0, 1.0, q * d * q.adjoint()}});
}

}  // namespace

TEST(LowEnergy, PermutationsCollectSuperdiagonalOnes) {
  const std::vector<std::vector<int>> cases{{2}, {1}, {1, 1}, {1, 2}, {2, 2}, {1, 3, 4}, {3, 1, 2}, {1, 1, 2, 5}};
  for (const auto& lengths : cases) {
    const auto idx = permutation_indices(lengths);
    const int mu = static_cast<int>(lengths.size());
    const int nu = static_cast<int>(idx.q.size());
    ASSERT_EQ(idx.sigma.size(), idx.q.size());
    Matrix p1 = Matrix::Zero(nu, nu), p2 = Matrix::Zero(nu, nu);
    for (int j = 0; j < nu; ++j) p1(idx.q[j], j) = 1.0;
    for (int k = 0; k < nu; ++k) p2(k, idx.sigma[k]) = 1.0;
    EXPECT_LT((p1.adjoint() * p1 - identity(nu)).norm(), 1e-15);
    EXPECT_LT((p2 * p2.adjoint() - identity(nu)).norm(), 1e-15);
    Matrix expected = Matrix::Zero(nu, nu);
    expected.bottomRightCorner(nu - mu, nu - mu) = identity(nu - mu);
    EXPECT_LT((p2 * nilpotent(lengths) * p1 - expected).norm(), 1e-15);
  }
}

TEST(LowEnergy, SingleChainOfLengthTwo) {
  const auto idx = permutation_indices({2});
  EXPECT_EQ(idx.q, (std::vector<int>{0, 1}));
  EXPECT_EQ(idx.sigma, (std::vector<int>{1, 0}));
}

TEST(LowEnergy, SchurInverseMatchesDirectInverse) {
  std::mt19937 rng(61);
  for (int p : {0, 1, 2, 3}) {
    const int q = 4 - p;
    const Matrix m = random_matrix(rng, 4) + 3.0 * identity(4);
    const Matrix inv = schur_inverse(m.topLeftCorner(p, p), m.topRightCorner(p, q), m.bottomLeftCorner(q, p),
                                     m.bottomRightCorner(q, q));
    EXPECT_LT((inv * m - identity(4)).norm(), 1e-12);
  }
  EXPECT_THROW(schur_inverse(identity(2), Matrix::Zero(2, 1), Matrix::Zero(1, 2), Matrix::Zero(1, 1)), NumericalError);
}

TEST(LowEnergy, ExamplePermutationsAndBlocks) {
  for (const std::string id : {"7.1", "7.3", "7.4"}) {
    const auto f = example_fixture(id);
    const auto ejd = jordan_form_exact(f.b);
    const auto exp = low_energy_expansion(ejd, f.a);  // V = 0, a = 0: R = A
    EXPECT_EQ(exp.p1, f.p1) << id;
    EXPECT_EQ(exp.p2, f.p2) << id;
    EXPECT_EQ(exp.a1, *f.a1) << id;
    EXPECT_EQ(exp.b1, *f.b1) << id;
    EXPECT_EQ(exp.c1, *f.c1) << id;
    EXPECT_EQ(exp.d0, *f.d0) << id;
    EXPECT_EQ(exp.s0, f.s0_printed) << id;

    const auto jd = to_numeric(ejd);
    const auto perms = build_permutations(jd);
    const auto z = z_blocks(jd, to_numeric(f.a), perms.p1, perms.p2);
    EXPECT_LT((z.a1 - to_numeric(*f.a1)).norm(), 1e-14) << id;
    EXPECT_LT((z.d0 - to_numeric(*f.d0)).norm(), 1e-14) << id;
  }
}

TEST(LowEnergy, BlocksFromFiniteDifferencesOfZ) {
  std::mt19937 rng(62);
  for (const std::string id : {"7.1", "7.4"}) {
    const auto f = example_fixture(id);
    const auto bc = fixture_bc(f);
    const auto pot = Potential::zero(bc.n());
    const auto jd = to_numeric(jordan_form_exact(f.b));
    const auto perms = build_permutations(jd);
    const auto z = z_blocks(jd, to_numeric(f.a), perms.p1, perms.p2);
    const double h = 1e-5;
    const Matrix dz = (z_of_k(pot, bc, h, 0.0, jd, perms.p1, perms.p2) -
                       z_of_k(pot, bc, -h, 0.0, jd, perms.p1, perms.p2)) / (2.0 * h);
    const Eigen::Index mu = jd.mu, rest = jd.n() - jd.mu;
    EXPECT_LT((dz.topLeftCorner(mu, mu) - z.a1).norm(), 1e-8) << id;
    EXPECT_LT((dz.topRightCorner(mu, rest) - z.b1).norm(), 1e-8) << id;
    EXPECT_LT((dz.bottomLeftCorner(rest, mu) - z.c1).norm(), 1e-8) << id;
    EXPECT_LT((z_of_k(pot, bc, 1e-9, 0.0, jd, perms.p1, perms.p2).bottomRightCorner(rest, rest) - z.d0).norm(), 1e-8);
  }
  // With a potential: blocks from R against the slope of Z at k = 0.
  const double v0 = tuned_resonance_depth();
  const auto pot = mixed_resonance(random_unitary(rng, 2), v0);
  const auto bc = from_angles(std::vector<double>{std::numbers::pi, std::numbers::pi});
  const double a = pot.x_max();
  const auto res = s_zero(pot, bc, a);
  const auto& jd = res.jd;
  ASSERT_EQ(jd.mu, 1);
  const auto perms = build_permutations(jd);
  const auto z = z_blocks(jd, r_matrix(pot, bc, a), perms.p1, perms.p2);
  const double h = 1e-5;
  const Matrix dz =
      (z_of_k(pot, bc, h, a, jd, perms.p1, perms.p2) - z_of_k(pot, bc, -h, a, jd, perms.p1, perms.p2)) / (2.0 * h);
  EXPECT_LT(std::abs(dz(0, 0) - z.a1(0, 0)), 1e-6 * std::max(1.0, std::abs(z.a1(0, 0))));
}

TEST(LowEnergy, ExampleSZeroMatchesOracle) {
  for (const auto& id : example_ids()) {
    const auto f = example_fixture(id);
    const auto bc = fixture_bc(f);
    const auto pot = Potential::zero(bc.n());
    const Matrix oracle = limit_oracle(f.b, ExactMatrix(-kImagUnit * f.a));
    for (auto mode : {JordanMode::exact, JordanMode::numeric}) {
      for (double a : {0.0, 1.5}) {
        const auto res = s_zero(pot, bc, a, {mode});
        EXPECT_LT((res.expansion.s0 - oracle).norm(), 1e-9) << id << " a=" << a;
        EXPECT_LT(res.involution_residual, 1e-9) << id;
        EXPECT_LT(res.unitarity_residual, 1e-9) << id;
        EXPECT_EQ(res.jd.mu, f.mu) << id;
        EXPECT_EQ(res.jd.nu, f.nu) << id;
        EXPECT_EQ(res.exact, mode == JordanMode::exact);
      }
    }
  }
}

TEST(LowEnergy, GenericBoundaryGivesMinusIdentity) {
  std::mt19937 rng(63);
  for (int trial = 0; trial < 5; ++trial) {
    const auto pot = random_two_piece(rng, 3);
    const auto bc = random_bc(rng, 3);
    const auto res = s_zero(pot, bc, pot.x_max());
    EXPECT_EQ(res.jd.mu, 0);
    EXPECT_LT((res.expansion.s0 + identity(3)).norm(), 1e-9);
    const auto asym = jost_inverse_asymptotics(res.expansion, res.jd);
    EXPECT_EQ(asym.order, 0);
    EXPECT_LT((asym.leading * res.j0 - identity(3)).norm(), 1e-9);
  }
}

TEST(LowEnergy, FreeNeumannGivesIdentityAndResidue) {
  const auto bc = from_angles(std::vector<double>{std::numbers::pi / 2, std::numbers::pi / 2});
  const auto pot = Potential::zero(2);
  for (auto mode : {JordanMode::exact, JordanMode::numeric}) {
    const auto res = s_zero(pot, bc, 0.0, {mode});
    EXPECT_EQ(res.jd.mu, 2);
    EXPECT_LT((res.expansion.s0 - identity(2)).norm(), 1e-12);
    const auto asym = jost_inverse_asymptotics(res.expansion, res.jd);
    EXPECT_EQ(asym.order, 1);
    EXPECT_LT((asym.leading + kI * identity(2)).norm(), 1e-12);
  }
}

TEST(LowEnergy, FreeDirichletGivesMinusIdentity) {
  const auto bc = from_angles(std::vector<double>{std::numbers::pi, std::numbers::pi, std::numbers::pi});
  const auto res = s_zero(Potential::zero(3), bc, 0.0, {JordanMode::exact});
  EXPECT_EQ(res.jd.mu, 0);
  EXPECT_LT((res.expansion.s0 + identity(3)).norm(), 1e-15);
}

TEST(LowEnergy, DeltaPrimeResidueMatchesJostInverse) {
  const auto f = example_fixture("7.1");
  const auto bc = fixture_bc(f);
  const auto pot = Potential::zero(3);
  const auto res = s_zero(pot, bc, 0.0, {JordanMode::exact});
  const auto asym = jost_inverse_asymptotics(res.expansion, res.jd);
  ASSERT_EQ(asym.order, 1);
  const double k = 1e-4;
  const Matrix kj = k * jost_matrix(pot, bc, k, 0.0).j.inverse();
  EXPECT_LT((kj - asym.leading).norm(), 1e-3);
  EXPECT_LT((res.expansion.l_minus1 * res.j0).norm(), 1e-12);
}

TEST(LowEnergy, TunedResonanceWell) {
  const double v0 = tuned_resonance_depth();
  EXPECT_NEAR(v0, std::numbers::pi * std::numbers::pi / 4.0, 1e-9);
  const auto pot = Potential::make(1, {{0.0, 1.0, Matrix::Constant(1, 1, -v0)}});
  const auto bc = from_angles(std::vector<double>{std::numbers::pi});
  const auto res = s_zero(pot, bc, pot.x_max());
  EXPECT_EQ(res.jd.mu, 1);
  EXPECT_LT((res.expansion.s0 - identity(1)).norm(), 1e-9);
  const auto asym = jost_inverse_asymptotics(res.expansion, res.jd);
  const double k = 1e-4;
  EXPECT_LT((k * jost_matrix(pot, bc, k, pot.x_max()).j.inverse() - asym.leading).norm(), 1e-3);
  for (size_t i = 1; i < res.probes.size(); ++i) EXPECT_LT(res.probes[i].dist, res.probes[i - 1].dist);
}

TEST(LowEnergy, MixedResonanceIsAPartialReflection) {
  std::mt19937 rng(64);
  const Matrix q = random_unitary(rng, 2);
  const auto pot = mixed_resonance(q, tuned_resonance_depth());
  const auto bc = from_angles(std::vector<double>{std::numbers::pi, std::numbers::pi});
  const auto res = s_zero(pot, bc, pot.x_max());
  ASSERT_EQ(res.jd.mu, 1);
  // +1 on the resonant channel, -1 on the other.
  const Matrix expected = q * Eigen::Vector2cd(1.0, -1.0).asDiagonal() * q.adjoint();
  EXPECT_LT((res.expansion.s0 - expected).norm(), 1e-7);
  EXPECT_LT((smatrix(pot, bc, 1e-4).s - res.expansion.s0).norm(), 1e-3);
}

TEST(LowEnergy, KernelBijectionAndCharacterization) {
  std::mt19937 rng(65);
  const Matrix q = random_unitary(rng, 2);
  const auto pot = mixed_resonance(q, tuned_resonance_depth());
  const auto bc = from_angles(std::vector<double>{std::numbers::pi, std::numbers::pi});
  const Vector u = q.col(0);
  for (double a : {0.5, pot.x_max()}) {
    const auto kb = kernel_bijection(pot, bc, a, u);
    EXPECT_LT(kb.adjoint_residual, 1e-9);
    EXPECT_LT(kb.solution_residual, 1e-9);
  }
  const auto in = kernel_characterization(pot, bc, u);
  EXPECT_TRUE(in.in_kernel);
  EXPECT_LT(in.growth, 10.0);
  const Vector w = q.col(1);
  const auto out = kernel_characterization(pot, bc, w);
  EXPECT_FALSE(out.in_kernel);
  EXPECT_GT(out.growth, 1e4);
  EXPECT_THROW(kernel_bijection(pot, bc, 0.0, w), ValidationError);
}

TEST(LowEnergy, InvariantUnderChainRescaling) {
  for (const auto& id : example_ids()) {
    const auto f = example_fixture(id);
    const auto jd = to_numeric(jordan_form_exact(f.b));
    const Matrix r = to_numeric(f.a);
    const auto base = low_energy_expansion(jd, r);
    std::vector<Complex> factors;
    for (int a = 0; a < jd.kappa; ++a) factors.push_back(Complex(1.0 + a, 0.5 - a));
    const auto scaled = low_energy_expansion(rescale_chains(jd, factors), r);
    EXPECT_LT((scaled.s0 - base.s0).norm(), 1e-12) << id;
    EXPECT_LT((scaled.l_minus1 - base.l_minus1).norm(), 1e-12) << id;
  }
}

TEST(LowEnergy, InvariantUnderGauge) {
  std::mt19937 rng(66);
  for (const auto& id : example_ids()) {
    const auto f = example_fixture(id);
    const auto bc = fixture_bc(f);
    const auto g = gauge_transform(bc, random_gauge(rng, bc.n()));
    const auto pot = Potential::zero(bc.n());
    const auto s = s_zero(pot, bc, 0.0).expansion.s0;
    EXPECT_LT((s_zero(pot, g, 0.0).expansion.s0 - s).norm(), 1e-8) << id;
  }
}

TEST(LowEnergy, ExactModeNeedsZeroPotential) {
  std::mt19937 rng(67);
  const auto pot = random_two_piece(rng, 2);
  EXPECT_THROW(s_zero(pot, random_bc(rng, 2), 0.0, {JordanMode::exact}), ValidationError);
}

TEST(LowEnergy, ContinuityProbesApproachSZero) {
  const auto f = example_fixture("7.1");
  const auto res = s_zero(Potential::zero(3), fixture_bc(f), 0.0);
  ASSERT_EQ(res.probes.size(), 3u);
  for (size_t i = 1; i < res.probes.size(); ++i) EXPECT_LT(res.probes[i].dist, res.probes[i - 1].dist);
  EXPECT_LT(res.probes.back().dist, 1e-2);
}
