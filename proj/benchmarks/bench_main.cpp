#include <benchmark/benchmark.h>

#include <random>

#include "neurocnn/census.hpp"
#include "neurocnn/invariants.hpp"
#include "neurocnn/jacobian.hpp"

using namespace neurocnn;

namespace {

WeightTuple<double> normal_weights(const Architecture& arch, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  return random_like<double>(arch, [&] { return dist(rng); });
}

const Architecture& deep_arch() {
  static const Architecture arch = validate_architecture(6, {2, 2, 2}, {2, 1, 1}, 3);
  return arch;
}

}  // namespace

static void BM_SymbolicNetwork(benchmark::State& state) {
  const auto& arch = deep_arch();
  const auto w = normal_weights(arch, 1);
  for (auto _ : state) benchmark::DoNotOptimize(symbolic_network(arch, w));
}
BENCHMARK(BM_SymbolicNetwork);

static void BM_JacobianLeibniz(benchmark::State& state) {
  const auto& arch = deep_arch();
  const auto w = normal_weights(arch, 2);
  for (auto _ : state) benchmark::DoNotOptimize(jacobian(arch, w));
}
BENCHMARK(BM_JacobianLeibniz);

static void BM_JacobianFactorization(benchmark::State& state) {
  const auto& arch = deep_arch();
  const auto w = normal_weights(arch, 3);
  const Eigen::MatrixXd lambda = factorization_matrix(arch);
  for (auto _ : state) benchmark::DoNotOptimize(jacobian_via_factorization(arch, w, lambda));
}
BENCHMARK(BM_JacobianFactorization);

static void BM_Table1(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(table1());
}
BENCHMARK(BM_Table1);

static void BM_CensusStart(benchmark::State& state) {
  const auto arch = validate_architecture(3, {2, 2}, {1, 1}, 2);
  DatasetSpec spec;
  spec.seed = 11;
  const auto ds = design_system(generate_dataset(arch, spec), arch);
  const LossLandscape f(arch, ds);
  const CensusOptions opts;
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(refine_stationary(f, census_start(arch, 1, i++), opts));
}
BENCHMARK(BM_CensusStart);
BENCHMARK_MAIN();
