#include <benchmark/benchmark.h>

#include "halfline/fixtures.hpp"
#include "halfline/low_energy.hpp"

using namespace halfline;

namespace {

void BM_JordanExact(benchmark::State& state) {
  const auto f = example_fixture("7.4");
  for (auto _ : state) benchmark::DoNotOptimize(jordan_form_exact(f.b).smat);
}
BENCHMARK(BM_JordanExact);

void BM_JordanNumeric(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; i += 2) m(i, i + 1) = 1.0;
  const Matrix p = Matrix::Identity(n, n) + 0.3 * Matrix::Ones(n, n);
  const Matrix a = p * m * p.inverse();
  for (auto _ : state) benchmark::DoNotOptimize(jordan_form(a, JordanMode::numeric, 1e-8, 1e-10).smat);
}
BENCHMARK(BM_JordanNumeric)->Arg(4)->Arg(8)->Arg(16);

void BM_SZero(benchmark::State& state) {
  const auto mode = state.range(0) == 0 ? JordanMode::exact : JordanMode::numeric;
  const auto f = example_fixture("7.1");
  const auto bc = BoundaryCondition::from_ab(to_numeric(f.a), to_numeric(f.b));
  const auto pot = Potential::zero(3);
  for (auto _ : state) benchmark::DoNotOptimize(s_zero(pot, bc, 0.0, {mode}).expansion.s0);
}
BENCHMARK(BM_SZero)->Arg(0)->Arg(1);

void BM_SZeroWell(benchmark::State& state) {
  const auto pot = Potential::make(1, {{0.0, 1.0, Matrix::Constant(1, 1, -2.4674011002723395)}});
  const auto bc = from_angles(std::vector<double>{3.141592653589793});
  for (auto _ : state) benchmark::DoNotOptimize(s_zero(pot, bc, 1.0).expansion.s0);
}
BENCHMARK(BM_SZeroWell);

}  // namespace
