#include <benchmark/benchmark.h>

#include "huberbench/complexity.hpp"
#include "huberbench/data.hpp"
#include "huberbench/loss.hpp"
#include "huberbench/solvers.hpp"

namespace {

using namespace huberbench;

ContaminatedDataset linear_problem(int n, int p, int sparsity, int outliers) {
  ContaminationSpec c;
  c.count = outliers;
  c.seed = 2;
  return make_regression_dataset(GaussianDesignSpec::identity(p), random_sparse_truth(p, sparsity, 3),
                                 NoiseModel::gaussian(1.0), c, n, 1);
}

void BM_HuberProx(benchmark::State& state) {
  const HuberParams params(1.0);
  double v = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(huber_prox(v, 0.5, 0.7, params));
    v += 1e-3;
    if (v > 3.0) v = -3.0;
  }
}
BENCHMARK(BM_HuberProx);

void BM_ErmFit(benchmark::State& state) {
  const auto ds = linear_problem(1000, 50, 50, int(state.range(0)));
  SolverConfig cfg;
  cfg.acceleration = true;
  for (auto _ : state) benchmark::DoNotOptimize(fit_erm_huber(ds, HuberParams(1.0), cfg).coefficients.data());
}
BENCHMARK(BM_ErmFit)->Arg(0)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_L1FitInteriorPoint(benchmark::State& state) {
  const int p = int(state.range(0));
  const auto ds = linear_problem(1000, p, 50, 100);
  SolverConfig cfg;
  cfg.method = SolverMethod::InteriorPoint;
  cfg.max_iter = 200;
  for (auto _ : state) benchmark::DoNotOptimize(fit_l1_huber(ds, HuberParams(1.0), 1e-3, cfg).coefficients.data());
}
BENCHMARK(BM_L1FitInteriorPoint)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MeanWidthIntersection(benchmark::State& state) {
  const SetSpec set = BallIntersection{1.0, 5.0};
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_mean_width_mc(set, int(state.range(0)), 2048, 7).estimate);
}
BENCHMARK(BM_MeanWidthIntersection)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
