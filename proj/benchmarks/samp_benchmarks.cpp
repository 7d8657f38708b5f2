#include <benchmark/benchmark.h>

#include "samp/denoiser.hpp"
#include "samp/model.hpp"
#include "samp/solvers.hpp"
#include "samp/spectral.hpp"

namespace {

using namespace samp;

SystemInstance bench_instance(Index K, EnsembleKind kind) {
  const EnsembleSpec ens{kind, K / 2, K};
  return generate_instance(ens, PriorSpec::bernoulli_gaussian(0.1), 0.01, 11);
}

void BM_BernoulliGaussianDenoiser(benchmark::State& state) {
  const Denoiser den(PriorSpec::bernoulli_gaussian(0.1));
  Vector kappa = Vector::LinSpaced(state.range(0), -4.0, 4.0);
  Vector eta, eta_prime;
  for (auto _ : state) {
    den.apply(kappa, 25.0, eta, eta_prime);
    benchmark::DoNotOptimize(eta.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BernoulliGaussianDenoiser)->Arg(1024)->Arg(16384);

void BM_QuadratureDenoiser(benchmark::State& state) {
  const auto prior = quadrature_prior(PriorSpec::bernoulli_gaussian(0.1));
  double kappa = 0.7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(denoise_quadrature(prior, kappa, 25.0));
  }
}
BENCHMARK(BM_QuadratureDenoiser);

void BM_SampleRowOrthogonal(benchmark::State& state) {
  const Index K = state.range(0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    Matrix A = sample_row_orthogonal(K / 2, K, seed++);
    benchmark::DoNotOptimize(A.data());
  }
}
BENCHMARK(BM_SampleRowOrthogonal)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SampIteration(benchmark::State& state) {
  const auto inst = bench_instance(state.range(0), EnsembleKind::RowOrthogonal);
  const Denoiser den(PriorSpec::bernoulli_gaussian(0.1));
  const auto spectral = SpectralModel::row_orthogonal(inst.alpha);
  SolverConfig cfg;
  cfg.max_iters = 1;
  cfg.tol = 1e-300;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_samp(inst, den, spectral, cfg, LambdaMode::Suboptimal));
  }
}
BENCHMARK(BM_SampIteration)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

// Includes the initial inversion of J + diag(lambda_bar).
void BM_EpIteration(benchmark::State& state) {
  const auto inst = bench_instance(state.range(0), EnsembleKind::IidGaussian);
  const Denoiser den(PriorSpec::bernoulli_gaussian(0.1));
  SolverConfig cfg;
  cfg.max_iters = 1;
  cfg.tol = 1e-300;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_ep(inst, den, cfg));
  }
}
BENCHMARK(BM_EpIteration)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RankOneUpdate(benchmark::State& state) {
  const Index K = state.range(0);
  const auto inst = bench_instance(K, EnsembleKind::IidGaussian);
  const auto aux = compute_auxiliaries(inst);
  Matrix sigma = (aux.J + Matrix::Identity(K, K)).inverse();
  Index k = 0;
  for (auto _ : state) {
    sigma_rank_one_update_inplace(sigma, k, 1e-3);
    k = (k + 1) % K;
    benchmark::DoNotOptimize(sigma.data());
  }
}
BENCHMARK(BM_RankOneUpdate)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
