#include "acpc/cycling.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace acpc;

static void BM_MatchTrigger(benchmark::State& state) {
    const auto set = build_trigger_set(1.0, static_cast<int>(state.range(0)), deg_to_rad(10.0));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(set.center - 0.2, set.center + 0.2);
    std::vector<double> x(1024);
    for (auto& v : x) v = u(rng);
    std::size_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(match_trigger(x[k++ & 1023], set));
}
BENCHMARK(BM_MatchTrigger)->Arg(30)->Arg(300)->Arg(3000);

static void BM_PlantStep(benchmark::State& state) {
    PlantState s;
    const PlantParams pp{700e-6, 5e-3};
    const Abc a{0.6, 0.4, 0.5}, b{0.5, 0.5, 0.5};
    for (auto _ : state) {
        s = plant_step(s, a, b, 800.0, 1.0 / 22e3, pp);
        benchmark::DoNotOptimize(s);
        if (std::abs(s.i_abc[0]) > 1e3) s = PlantState{};
    }
}
BENCHMARK(BM_PlantStep);

static void BM_SvpwmDuties(benchmark::State& state) {
    double th = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(svpwm_duties({200.0, 300.0}, th, 800.0));
        th = wrap_2pi(th + 0.01);
    }
}
BENCHMARK(BM_SvpwmDuties);

static void BM_EstimateRon(benchmark::State& state) {
    SamplerState s(300, 300);
    for (int k = 0; k < 300; ++k) s.offer(k, 0.4 + 1e-4 * k, 100.0);
    const auto taps = fir_lowpass();
    for (auto _ : state) benchmark::DoNotOptimize(estimate_ron(s, taps));
}
BENCHMARK(BM_EstimateRon);

static void BM_BenchFundamental(benchmark::State& state) {
    Scenario sc;
    sc.bench.t_on = 0.3;
    sc.bench.t_off = 0.5;
    sc.sampler.budget = 300;
    Bench b(validate(sc));
    b.set_converter(true, 400.0);
    for (auto _ : state) {
        b.run_fundamental_cycles(1);
        if (b.t_j(0) > 120.0) {
            state.PauseTiming();
            b.cool_to_ambient(1.0);
            b.set_converter(true, 400.0);
            state.ResumeTiming();
        }
    }
}
BENCHMARK(BM_BenchFundamental)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
