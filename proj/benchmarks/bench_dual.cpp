#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "resalloc/dual.hpp"
#include "resalloc/envelope.hpp"
#include "resalloc/generate.hpp"
#include "resalloc/solver.hpp"

namespace resalloc {
namespace {

Problem scaling_instance(std::size_t jobs, std::size_t resources) {
  GeneratorSpec spec;
  spec.family = GeneratorFamily::kScaling;
  spec.jobs = jobs;
  spec.resources = resources;
  spec.seed = 3;
  return generate_problem(spec);
}

void BM_EvaluateDualJobs(benchmark::State& state) {
  const Problem p = scaling_instance(static_cast<std::size_t>(state.range(0)), 4);
  const auto prices = initialize_prices(p);
  DualEval out;
  for (auto _ : state) {
    evaluate_dual_into(p, prices, {}, out);
    benchmark::DoNotOptimize(out.dual_value);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvaluateDualJobs)->RangeMultiplier(4)->Range(1 << 12, 1 << 20)->Complexity();

void BM_EvaluateDualResources(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const Problem p = scaling_instance(20'000, m);
  const auto prices = initialize_prices(p);
  KernelOptions options;
  options.envelope = state.range(1) == 0 ? EnvelopeMethod::kHull : EnvelopeMethod::kPairwise;
  DualEval out;
  for (auto _ : state) {
    evaluate_dual_into(p, prices, options, out);
    benchmark::DoNotOptimize(out.dual_value);
  }
  state.SetLabel(state.range(1) == 0 ? "hull" : "pairwise");
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvaluateDualResources)
    ->ArgsProduct({{4, 8, 16, 32, 64}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_BuildEnvelope(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  std::vector<double> a(m), p(m);
  for (std::size_t j = 0; j < m; ++j) {
    a[j] = unit(rng);
    p[j] = unit(rng);
  }
  const auto method = state.range(1) == 0 ? EnvelopeMethod::kHull : EnvelopeMethod::kPairwise;
  CostEnvelope env;
  EnvelopeScratch scratch;
  for (auto _ : state) {
    build_envelope_into(a, p, method, env, scratch);
    benchmark::DoNotOptimize(env.throughput.data());
  }
  state.SetLabel(state.range(1) == 0 ? "hull" : "pairwise");
}
BENCHMARK(BM_BuildEnvelope)->ArgsProduct({{4, 16, 64, 256}, {0, 1}});

void BM_SolveMedium(benchmark::State& state) {
  GeneratorSpec spec;
  spec.jobs = static_cast<std::size_t>(state.range(0));
  spec.seed = 7;
  const Problem p = generate_problem(spec);
  for (auto _ : state) {
    auto r = solve(p);
    benchmark::DoNotOptimize(r.primal_utility);
  }
}
BENCHMARK(BM_SolveMedium)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace resalloc

BENCHMARK_MAIN();
