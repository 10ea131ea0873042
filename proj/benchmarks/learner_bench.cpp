// Microbenchmarks for bound extraction and matrix factorization.
#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include <random>

#include "nspforge/learner.hpp"
#include "nspforge/synth.hpp"

namespace {

void BM_LearnCsp(benchmark::State& state) {
  const auto corpus = nsp::synth::bounded_corpus(static_cast<int>(state.range(0)), 25, 7, 4,
                                                 {}, 11);
  for (auto _ : state) {
    const auto learned = nsp::learner::learn_csp(corpus.schedules);
    benchmark::DoNotOptimize(learned);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LearnCsp)->RangeMultiplier(4)->Range(8, 512)->Complexity(benchmark::oN);

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::uniform_real_distribution<double> unit(0.0, 8.0);
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = unit(eng);
  return m;
}

void BM_NmfFactorize(benchmark::State& state) {
  const auto matrix = random_matrix(static_cast<int>(state.range(0)),
                                    static_cast<int>(state.range(1)), 29);
  for (auto _ : state) {
    const auto factors =
        nsp::learner::nmf_factorize(matrix, static_cast<int>(state.range(2)), 200, 0.0, 1);
    benchmark::DoNotOptimize(factors);
  }
}
BENCHMARK(BM_NmfFactorize)->Args({5, 7, 3})->Args({25, 28, 4})->Args({50, 56, 6});

void BM_NmfPredict(benchmark::State& state) {
  const auto matrix = random_matrix(25, 28, 31);
  const auto factors = nsp::learner::nmf_factorize(matrix, 4, 200, 0.0, 1);
  Eigen::MatrixXd mask = Eigen::MatrixXd::Ones(25, 28);
  mask(0, 0) = 0;
  mask(24, 27) = 0;
  for (auto _ : state) {
    const auto prediction = nsp::learner::nmf_predict(matrix, mask, factors);
    benchmark::DoNotOptimize(prediction);
  }
}
BENCHMARK(BM_NmfPredict);

}  // namespace

BENCHMARK_MAIN();
