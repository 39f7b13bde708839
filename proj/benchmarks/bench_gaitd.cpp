#include <benchmark/benchmark.h>

#include <gaitd/gaitd.hpp>

using namespace gaitd;

namespace {

SpecialSets smoking_sets() {
  SpecialSets s;
  s.trunc = {0};
  s.alt_p = {2, 15, 25, 35, 45};
  s.inf_p = {5, 10, 20, 30, 40, 50, 60};
  s.inf_np = {1, 8, 12, 18};
  s.def_p = {9, 11, 13, 19, 21, 29, 31};
  return s;
}

GaitdParams smoking_params() {
  GaitdParams p;
  p.theta_pi = {12.0, 2.5};
  p.theta_alpha = {20.0, 4.0};
  p.theta_iota = {15.0, 2.0};
  p.theta_delta = {14.0, 3.0};
  p.omega_p = 0.12;
  p.phi_p = 0.25;
  p.psi_p = 0.05;
  p.phi_np = {0.02, 0.03, 0.02, 0.015};
  return p;
}

void BM_Construct(benchmark::State& state) {
  const auto sets = smoking_sets();
  const auto params = smoking_params();
  for (auto _ : state) benchmark::DoNotOptimize(GaitdDist(Family::NegBinomial, sets, params).delta());
}
BENCHMARK(BM_Construct);

void BM_Pmf(benchmark::State& state) {
  const GaitdDist d(Family::NegBinomial, smoking_sets(), smoking_params());
  Count y = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.pmf(y));
    y = (y + 1) % 80;
  }
}
BENCHMARK(BM_Pmf);

void BM_Cdf(benchmark::State& state) {
  const GaitdDist d(Family::NegBinomial, smoking_sets(), smoking_params());
  Count y = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(d.cdf(y));
    y = (y + 1) % 80;
  }
}
BENCHMARK(BM_Cdf);

void BM_Sample(benchmark::State& state) {
  const GaitdDist d(Family::NegBinomial, smoking_sets(), smoking_params());
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(d.sample(static_cast<std::size_t>(state.range(0)), seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sample)->Arg(1000)->Arg(100000);

void BM_FitZip(benchmark::State& state) {
  ModelSpec spec;
  spec.sets.inf_np = {0};
  GaitdParams p;
  p.theta_pi = {2.0};
  p.phi_np = {0.3};
  const auto y = GaitdDist(Family::Poisson, spec.sets, p).sample(static_cast<std::size_t>(state.range(0)), 3);
  const auto data = Data::intercept_only(y);
  for (auto _ : state) benchmark::DoNotOptimize(fit_irls(spec, data).loglik);
}
BENCHMARK(BM_FitZip)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_FitSmoking(benchmark::State& state) {
  ModelSpec spec;
  spec.family = Family::NegBinomial;
  spec.sets = smoking_sets();
  const auto y = GaitdDist(Family::NegBinomial, spec.sets, smoking_params()).sample(5000, 777);
  const auto data = Data::intercept_only(y);
  for (auto _ : state) benchmark::DoNotOptimize(fit_irls(spec, data).loglik);
}
BENCHMARK(BM_FitSmoking)->Unit(benchmark::kMillisecond);

void BM_SleepSearch(benchmark::State& state) {
  std::vector<Count> hours;
  for (Count h = 3; h <= 12; ++h) hours.push_back(h);
  const auto data = Data::intercept_only(hours, {16, 125, 443, 1760, 3076, 3766, 891, 170, 10, 7});
  ModelSpec spec;
  spec.sets.inf_np = {8};
  for (auto _ : state) benchmark::DoNotOptimize(search_m(spec, data, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10}).best);
}
BENCHMARK(BM_SleepSearch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
