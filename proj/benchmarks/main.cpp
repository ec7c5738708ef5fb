#include <benchmark/benchmark.h>

#include "crspectra/balance.hpp"
#include "crspectra/conformal.hpp"
#include "crspectra/polynomial.hpp"
#include "crspectra/quadrature.hpp"
#include "crspectra/rng.hpp"
#include "crspectra/spectral.hpp"

using namespace crspectra;

namespace {

void BM_ProductRule(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    QuadratureRule rule = product_rule_s3(m);
    benchmark::DoNotOptimize(rule.weights.sum());
  }
}
BENCHMARK(BM_ProductRule)->Arg(14)->Arg(24);

void BM_AssembleFlat(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  const QuadratureRule rule = product_rule_s3(2 * degree + 6);
  const auto basis = monomial_basis(1, degree);
  const ConformalFactor one = ConformalFactor::constant(1.0);
  for (auto _ : state) {
    SpectralProblem problem = assemble(one, basis, rule);
    benchmark::DoNotOptimize(problem.volume);
  }
  state.counters["nodes"] = static_cast<double>(rule.size());
  state.counters["basis"] = static_cast<double>(basis.size());
}
BENCHMARK(BM_AssembleFlat)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_SolveFlat(benchmark::State& state) {
  const int degree = static_cast<int>(state.range(0));
  const QuadratureRule rule = product_rule_s3(2 * degree + 6);
  const SpectralProblem problem =
      assemble(ConformalFactor::constant(1.0), monomial_basis(1, degree), rule);
  for (auto _ : state) {
    SpectralResult res = solve(problem, 60);
    benchmark::DoNotOptimize(res.lambda1);
  }
}
BENCHMARK(BM_SolveFlat)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_RayleighQuotient(benchmark::State& state) {
  const QuadratureRule rule = product_rule_s3(14);
  const ConformalFactor one = ConformalFactor::constant(1.0);
  const RealPolynomial x2 = RealPolynomial::variable(4, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rayleigh_quotient(x2, one, rule));
  }
  state.counters["nodes"] = static_cast<double>(rule.size());
}
BENCHMARK(BM_RayleighQuotient)->Unit(benchmark::kMillisecond);

void BM_BalanceExtremal(benchmark::State& state) {
  const QuadratureRule rule = product_rule_s3(static_cast<int>(state.range(0)));
  RandomStream rng(1);
  const ConformalFactor f = ConformalFactor::extremal(random_sphere_point(1, rng), 0.5);
  const WeightedMeasure mu = WeightedMeasure::from_density(rule, f);
  for (auto _ : state) {
    BalancePoint bp = solve_balance(mu);
    benchmark::DoNotOptimize(bp.residual);
  }
  state.counters["nodes"] = static_cast<double>(rule.size());
}
BENCHMARK(BM_BalanceExtremal)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
