#include <benchmark/benchmark.h>

#include "corrlasso/cgmt_engine.hpp"
#include "corrlasso/correlation.hpp"
#include "corrlasso/lasso_solver.hpp"
#include "corrlasso/montecarlo.hpp"
#include "corrlasso/signal_priors.hpp"

using namespace corrlasso;

namespace {

const CorrelationSpectrum& default_spectrum() {
  static const auto s = spectral_decompose(CorrelationModel::exponential(0.7, 280));
  return s;
}

ProblemConfig default_config() {
  ProblemConfig c;
  c.correlation.type = CorrelationSpec::Type::exponential;
  c.correlation.rho = 0.7;
  c.sigma2 = 0.01;
  c.threads = 1;
  return c;
}

}  // namespace

static void BM_ExpectationClosedForm(benchmark::State& state) {
  double c = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(expectation_e_bernoulli(0.1, c, 0.2));
    c += 1e-12;
  }
}
BENCHMARK(BM_ExpectationClosedForm);

static void BM_ExpectationQuadrature(benchmark::State& state) {
  const auto prior = SparsePrior::bernoulli(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(expectation_e_quadrature(prior, 0.3, 0.2));
}
BENCHMARK(BM_ExpectationQuadrature);

static void BM_SolveMu(benchmark::State& state) {
  const CgmtEngine eng({default_spectrum().eigenvalues, 400, 0.01, 0.1, SparsePrior::bernoulli(0.1)});
  for (auto _ : state) benchmark::DoNotOptimize(eng.solve_mu(0.02, 0.085));
}
BENCHMARK(BM_SolveMu);

static void BM_SolveSaddle(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0)) / 1000.0;
  const CgmtEngine eng({default_spectrum().eigenvalues, 400, 0.01, lambda, SparsePrior::bernoulli(0.1)});
  for (auto _ : state) benchmark::DoNotOptimize(eng.solve_saddle());
}
BENCHMARK(BM_SolveSaddle)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_LassoSolve(benchmark::State& state) {
  const double lambda = static_cast<double>(state.range(0)) / 1000.0;
  const auto inst = draw_instance(default_spectrum(), SparsePrior::bernoulli(0.1), 400, 0.01, 1);
  const PreparedLasso lasso(inst.design, inst.observations);
  for (auto _ : state) benchmark::DoNotOptimize(lasso.solve(lambda));
}
BENCHMARK(BM_LassoSolve)->Arg(10)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_Trial(benchmark::State& state) {
  auto c = default_config();
  c.lambda = 0.1;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_trial(c, default_spectrum(), seed++));
}
BENCHMARK(BM_Trial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
