#include <benchmark/benchmark.h>

#include "abm/analytic.hpp"
#include "abm/calibration.hpp"
#include "abm/oracle.hpp"
#include "abm/pde.hpp"

namespace {

abm::MarketState benchmark_market() {
    abm::MarketState ms;
    ms.spot = 5.0;
    ms.sigma_s = 3.0;
    ms.rate = 0.05;
    ms.maturity_time = 0.5;
    return ms;
}

const abm::OptionContract kCall{abm::OptionKind::call, abm::Exercise::european,
                                5.0, abm::Underlying::no_dividend};

void BM_AnalyticPrice(benchmark::State& state) {
    const abm::MarketState ms = benchmark_market();
    for (auto _ : state)
        benchmark::DoNotOptimize(abm::price_european(ms, kCall).price);
}
BENCHMARK(BM_AnalyticPrice);

void BM_Quadrature(benchmark::State& state) {
    const abm::MarketState ms = benchmark_market();
    const int nodes = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(abm::price_by_quadrature(ms, kCall, nodes));
}
BENCHMARK(BM_Quadrature)->Arg(16)->Arg(64)->Arg(128);

void BM_MonteCarlo(benchmark::State& state) {
    const abm::MarketState ms = benchmark_market();
    const abm::McConfig cfg{static_cast<std::uint64_t>(state.range(0)), 42, true};
    for (auto _ : state)
        benchmark::DoNotOptimize(abm::price_by_mc(ms, kCall, cfg).price);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(10000)->Arg(100000);

void BM_PdeEuropean(benchmark::State& state) {
    const abm::MarketState ms = benchmark_market();
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            abm::solve_european(ms, kCall, {n, n, 8.0}).value_at(5.0));
}
BENCHMARK(BM_PdeEuropean)->Arg(100)->Arg(400);

void BM_PdeAmericanPut(benchmark::State& state) {
    const abm::MarketState ms = benchmark_market();
    const abm::OptionContract put{abm::OptionKind::put, abm::Exercise::american,
                                  5.0, abm::Underlying::no_dividend};
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            abm::solve_american(ms, put, {n, n, 8.0}).value_at(5.0));
}
BENCHMARK(BM_PdeAmericanPut)->Arg(100)->Arg(200);

void BM_ImpliedSigma(benchmark::State& state) {
    const abm::MarketState ms = benchmark_market();
    const double price = abm::price_european(ms, kCall).price;
    for (auto _ : state)
        benchmark::DoNotOptimize(abm::implied_sigma(ms, kCall, price).sigma_s);
}
BENCHMARK(BM_ImpliedSigma);

} // namespace

BENCHMARK_MAIN();
