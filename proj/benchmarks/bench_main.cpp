#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "cme/coefficient_matrix.hpp"
#include "cme/estimator.hpp"
#include "cme/kernel.hpp"
#include "cme/lowerbound.hpp"
#include "cme/norms.hpp"
#include "cme/random.hpp"
#include "cme/synthetic.hpp"

namespace {

using namespace cme;

Eigen::VectorXd random_points(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXd xs(n);
  for (int i = 0; i < n; ++i) xs[i] = rng.uniform01();
  return xs;
}

TwoPointProblem bench_problem(double p, int n_trunc) {
  SpectralBasis basis = SpectralBasis::make(p, n_trunc);
  return make_two_point_problem(make_source(basis, 1.0, 1.0, 1.0, 2, n_trunc, 7));
}

void BM_GramDesigned(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Kernel k = Kernel::designed(SpectralBasis::make(0.5, 512));
  Eigen::VectorXd xs = random_points(n, 1);
  for (auto _ : state) {
    GramMatrix g = gram(k, xs);
    benchmark::DoNotOptimize(g.entries.data());
  }
}
BENCHMARK(BM_GramDesigned)->Arg(64)->Arg(256)->Arg(1024);

void BM_GramGaussian(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  Kernel k = Kernel::gaussian(0.5);
  Eigen::VectorXd xs = random_points(n, 2);
  for (auto _ : state) {
    GramMatrix g = gram(k, xs);
    benchmark::DoNotOptimize(g.entries.data());
  }
}
BENCHMARK(BM_GramGaussian)->Arg(64)->Arg(256)->Arg(1024);

void BM_FitDualRoute(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  TwoPointProblem prob = bench_problem(0.5, 2048);  // n_trunc > n: dual solve
  Dataset data = sample_dataset(prob, n, 3);
  for (auto _ : state) {
    CmeModel model = fit_cme(prob, data, 0.01);
    benchmark::DoNotOptimize(model.ridge);
  }
}
BENCHMARK(BM_FitDualRoute)->Arg(128)->Arg(512);

void BM_FitPrimalRoute(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  TwoPointProblem prob = bench_problem(0.5, 128);  // n_trunc <= n: primal solve
  Dataset data = sample_dataset(prob, n, 4);
  for (auto _ : state) {
    CmeModel model = fit_cme(prob, data, 0.01);
    benchmark::DoNotOptimize(model.ridge);
  }
}
BENCHMARK(BM_FitPrimalRoute)->Arg(512)->Arg(2048);

void BM_EstimateCoefficients(benchmark::State& state) {
  TwoPointProblem prob = bench_problem(0.5, 256);
  Dataset data = sample_dataset(prob, 512, 5);
  CmeModel model = fit_cme(prob, data, 0.01);
  for (auto _ : state) {
    CoefficientMatrix est = estimate_coefficients(model, prob);
    benchmark::DoNotOptimize(est.a.data());
  }
}
BENCHMARK(BM_EstimateCoefficients);

void BM_PointwiseErrorSq(benchmark::State& state) {
  TwoPointProblem prob = bench_problem(0.5, 256);
  Dataset data = sample_dataset(prob, 256, 6);
  CmeModel model = fit_cme(prob, data, 0.01);
  double x = 0.0;
  for (auto _ : state) {
    x += 0.001;
    if (x > 1.0) x = 0.0;
    benchmark::DoNotOptimize(pointwise_error_sq(model, prob, x));
  }
}
BENCHMARK(BM_PointwiseErrorSq);

void BM_KlDivergence(benchmark::State& state) {
  SpectralBasis basis = SpectralBasis::make(0.5, 64);
  TwoPointProblem tmpl =
      make_two_point_problem(make_constant_source(basis, 1.0, 0.0, 1.0));
  PackingFamily fam = build_packing(basis, 1.0, 0.0, 0.5, 0.004, 16, 7, 4);
  std::vector<TwoPointProblem> probs = adversarial_family(fam, tmpl);
  for (auto _ : state)
    benchmark::DoNotOptimize(kl_divergence(probs[0], probs[1], 256));
}
BENCHMARK(BM_KlDivergence);

}  // namespace

BENCHMARK_MAIN();
