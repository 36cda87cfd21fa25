// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "kwising/kacward.hpp"
#include "kwising/oracle.hpp"
#include "kwising/projection.hpp"
#include "kwising/quantum.hpp"
#include "kwising/thermodynamics.hpp"

namespace {

using namespace kwising;

const Couplings kJ{0.7, -0.4, 0.9};

void BM_BruteForceZ_Serial(benchmark::State& state) {
  const TorusSpec spec(4, 5);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_Z_serial(spec, kJ));
}

void BM_BruteForceZ_Parallel(benchmark::State& state) {
  const TorusSpec spec(4, 5);
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_Z(spec, kJ));
}

void BM_EvenSubgraphs_Serial(benchmark::State& state) {
  const TorusSpec spec(3, 3);
  const FaithfulProjection p1(spec, ProjectionVariant::G1);
  const FaithfulProjection p2(spec, ProjectionVariant::G2);
  for (auto _ : state) benchmark::DoNotOptimize(even_subgraph_sums_serial(spec, kJ, p1, p2));
}

void BM_EvenSubgraphs_Parallel(benchmark::State& state) {
  const TorusSpec spec(3, 3);
  const FaithfulProjection p1(spec, ProjectionVariant::G1);
  const FaithfulProjection p2(spec, ProjectionVariant::G2);
  for (auto _ : state) benchmark::DoNotOptimize(even_subgraph_sums(spec, kJ, p1, p2));
}

void BM_ProductFormula_Serial(benchmark::State& state) {
  const TorusSpec spec(512, 512);
  for (auto _ : state) {
    benchmark::DoNotOptimize(product_formula_log_det_serial(spec, kJ, ProjectionVariant::G1));
  }
}

void BM_ProductFormula_Parallel(benchmark::State& state) {
  const TorusSpec spec(512, 512);
  for (auto _ : state) {
    benchmark::DoNotOptimize(product_formula_log_det(spec, kJ, ProjectionVariant::G1));
  }
}

void BM_Cylinder_Serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cylinder_free_energy_serial(64, kJ).value);
}

void BM_Cylinder_Parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(cylinder_free_energy(64, kJ).value);
}

void BM_ExactDiag_Sectors(benchmark::State& state) {
  const QuantumParams p = QuantumParams::make(2.0, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(exact_diag_free_energy(10, p));
}

void BM_ExactDiag_Dense(benchmark::State& state) {
  const QuantumParams p = QuantumParams::make(2.0, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(exact_diag_free_energy_dense(10, p));
}

BENCHMARK(BM_BruteForceZ_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BruteForceZ_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvenSubgraphs_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvenSubgraphs_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProductFormula_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProductFormula_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Cylinder_Serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Cylinder_Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactDiag_Sectors)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactDiag_Dense)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
