#include <benchmark/benchmark.h>

#include "slspec/chardet.hpp"
#include "slspec/degenerate.hpp"
#include "slspec/root_functions.hpp"
#include "slspec/spectrum.hpp"

using namespace slspec;

namespace {

void BM_FundamentalLinearQ(benchmark::State& state) {
  const Potential q = Potential::polynomial({0.0, 1.0});
  const cplx mu{static_cast<double>(state.range(0)), 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(fundamental_at_pi(q, mu));
}
BENCHMARK(BM_FundamentalLinearQ)->Arg(2)->Arg(10)->Arg(40);

void BM_DeltaSampledQ(benchmark::State& state) {
  const Potential q = Potential::sampled([](double x) { return cplx{std::cos(2.0 * x), 0.1 * x}; }, 1025);
  DetOptions opt;
  opt.cache = false;
  const DetEvaluator ev(q, BcMatrix::periodic(), opt);
  for (auto _ : state) benchmark::DoNotOptimize(ev.delta({7.3, 0.4}));
}
BENCHMARK(BM_DeltaSampledQ);

void BM_SpectrumPeriodicLinearQ(benchmark::State& state) {
  const Potential q = Potential::polynomial({0.0, 0.5});
  for (auto _ : state) {
    const DetEvaluator ev(q, BcMatrix::periodic());
    benchmark::DoNotOptimize(locate_spectrum(ev, {0.0, double(state.range(0)) + 0.5, -1.0, 1.0}));
  }
}
BENCHMARK(BM_SpectrumPeriodicLinearQ)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_RootSystemDirichlet(benchmark::State& state) {
  const Potential q = Potential::polynomial({0.0, 1.0});
  const SpectrumReport r = locate_spectrum(DetEvaluator(q, BcMatrix::dirichlet()), {0.0, 12.5, -1.0, 1.0});
  for (auto _ : state) {
    const auto chains = root_system(q, BcMatrix::dirichlet(), r);
    benchmark::DoNotOptimize(dual_system(q, BcMatrix::dirichlet(), chains));
  }
}
BENCHMARK(BM_RootSystemDirichlet)->Unit(benchmark::kMillisecond);

void BM_ProductEval(benchmark::State& state) {
  const ProductSpec spec = make_product_spec(ProductKind::Example1, static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(product_eval(spec, {37.3, 4.0}));
}
BENCHMARK(BM_ProductEval)->Arg(64)->Arg(512)->Arg(4096);

void BM_PaleyWienerEvidence(benchmark::State& state) {
  const ProductSpec spec = make_product_spec(ProductKind::Example1, 512, 2);
  for (auto _ : state) benchmark::DoNotOptimize(pw_membership_check(spec, 128.0, 20.0));
}
BENCHMARK(BM_PaleyWienerEvidence)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
