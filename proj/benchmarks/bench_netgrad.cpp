#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "netgrad/flow.hpp"
#include "netgrad/model_driftdiffusion.hpp"
#include "netgrad/model_pnp.hpp"

using namespace netgrad;

namespace {

constexpr double kPi = std::numbers::pi;

Domain square(int n) { return Domain::rect(n, n); }

ScalarField sine_source(const Domain& d) {
  return ScalarField::sample(d, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
}

SymTensorField graded(const Domain& d) {
  SymTensorField D(d);
  for (std::size_t k = 0; k < d.size(); ++k) {
    const double x = d.coord(k, 0);
    D.set(k, {1.0 + 0.3 * x, 0.1 * x, 1.2});
  }
  return D;
}

DriftDiffusionSetup dd_setup(const Domain& d) {
  const ScalarField phi = ScalarField::sample(d, [](double x, double y) { return 0.5 * x * (1 - x) * y * (1 - y); });
  return DriftDiffusionSetup(sine_source(d), 1.0, 1.0, phi, EntropyGenerator::make_boltzmann());
}

void BM_EllipticSolve(benchmark::State& state) {
  const Domain d = square(static_cast<int>(state.range(0)));
  const auto setup = dd_setup(d);
  const SymTensorField D = graded(d);
  for (auto _ : state) benchmark::DoNotOptimize(solve_w(setup, D));
}
BENCHMARK(BM_EllipticSolve)->Arg(17)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMillisecond);

void BM_EnergyDriftDiffusion(benchmark::State& state) {
  const Domain d = square(static_cast<int>(state.range(0)));
  const auto setup = dd_setup(d);
  const SymTensorField D = graded(d);
  for (auto _ : state) benchmark::DoNotOptimize(energy_dd(setup, D));
}
BENCHMARK(BM_EnergyDriftDiffusion)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

void BM_GummelSolve(benchmark::State& state) {
  const Domain d = square(static_cast<int>(state.range(0)));
  const PNPSetup setup(sine_source(d), 1.0);
  const SymTensorField D = graded(d);
  for (auto _ : state) benchmark::DoNotOptimize(gummel_solve(setup, D));
}
BENCHMARK(BM_GummelSolve)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

void BM_DriftDiffusionFlowStep(benchmark::State& state) {
  const Domain d = square(static_cast<int>(state.range(0)));
  const DriftDiffusionFlow model(dd_setup(d));
  FlowParams p;
  p.steps = 1;
  p.dt = 1e-3;
  p.beta = 0.1;
  p.alpha = 0.5;
  p.gamma = 1.5;
  const SymTensorField D = graded(d);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(model, D, p));
}
BENCHMARK(BM_DriftDiffusionFlowStep)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
