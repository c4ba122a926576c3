#include <numbers>

#include <benchmark/benchmark.h>

#include "halfline/scattering.hpp"

using namespace halfline;

namespace {

Potential well(Eigen::Index n) {
  Matrix v1 = Matrix::Identity(n, n);
  Matrix v2 = -2.0 * Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    v1(i, i + 1) = v1(i + 1, i) = 0.5;
    v2(i, i + 1) = Complex(0.0, 0.3);
    v2(i + 1, i) = Complex(0.0, -0.3);
  }
  return Potential::make(n, {{0.0, 0.6, v1}, {0.6, 1.5, v2}});
}

BoundaryCondition mixed_angles(Eigen::Index n) {
  std::vector<double> angles;
  for (Eigen::Index i = 0; i < n; ++i) angles.push_back(std::numbers::pi * (i + 1) / (n + 1));
  return from_angles(angles);
}

void BM_JostMatrix(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto pot = well(n);
  const auto bc = mixed_angles(n);
  for (auto _ : state) benchmark::DoNotOptimize(jost_matrix(pot, bc, 1.3, pot.x_max()).j);
}
BENCHMARK(BM_JostMatrix)->Arg(1)->Arg(3)->Arg(8);

void BM_SMatrix(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto pot = well(n);
  const auto bc = mixed_angles(n);
  for (auto _ : state) benchmark::DoNotOptimize(smatrix(pot, bc, 1.3).s);
}
BENCHMARK(BM_SMatrix)->Arg(1)->Arg(3)->Arg(8);

void BM_FreeSMatrix(benchmark::State& state) {
  const auto bc = mixed_angles(4);
  const auto pot = Potential::zero(4);
  for (auto _ : state) benchmark::DoNotOptimize(smatrix(pot, bc, 0.7).s);
}
BENCHMARK(BM_FreeSMatrix);

}  // namespace
