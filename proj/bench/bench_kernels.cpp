#include "sqzrot/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace sqzrot;

namespace {

Coeffs random_coeffs(int l_max)
{
    std::mt19937 gen(1);
    std::normal_distribution<double> g;
    Coeffs c(lm_count(l_max));
    for (auto& v : c)
        v = {g(gen), g(gen)};
    return c;
}

template <class Fn>
void run_synthesize(benchmark::State& st, Fn fn)
{
    const int L = static_cast<int>(st.range(0));
    const Coeffs c = random_coeffs(L);
    const SphereGrid g = build_grid(2 * L);
    for (auto _ : st)
        benchmark::DoNotOptimize(fn(c, L, g));
}

template <class Fn>
void run_analyze(benchmark::State& st, Fn fn)
{
    const int L = static_cast<int>(st.range(0));
    const SphereGrid g = build_grid(2 * L);
    const auto values = kernels::serial::synthesize(random_coeffs(L), L, g);
    for (auto _ : st)
        benchmark::DoNotOptimize(fn(values, g, L));
}

template <class Fn>
void run_evaluate(benchmark::State& st, Fn fn)
{
    const int L = static_cast<int>(st.range(0));
    const Coeffs c = random_coeffs(L);
    std::vector<double> xs(4096), ps(4096);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xs[i] = std::cos(0.001 * i);
        ps[i] = 0.01 * i;
    }
    for (auto _ : st)
        benchmark::DoNotOptimize(fn(c, L, xs, ps));
}

template <class Fn>
void run_combo(benchmark::State& st, Fn fn)
{
    const int L = static_cast<int>(st.range(0));
    const Coeffs c = random_coeffs(L);
    const LadderCombo op{{0.75, 0.0}, {-0.25, 0.0}, {-0.866, 0.0}, {0.0, 0.0}};
    for (auto _ : st)
        benchmark::DoNotOptimize(fn(op, c, L));
}

template <class Fn>
void run_trace(benchmark::State& st, Fn fn)
{
    const int L = static_cast<int>(st.range(0));
    std::vector<double> w(static_cast<std::size_t>(L + 1), 1.0 / (L + 1));
    std::vector<double> taus(2001);
    for (std::size_t i = 0; i < taus.size(); ++i)
        taus[i] = static_cast<double>(i) / 2000.0;
    for (auto _ : st)
        benchmark::DoNotOptimize(fn(w, taus));
}

void BM_synthesize_serial(benchmark::State& s) { run_synthesize(s, kernels::serial::synthesize); }
void BM_synthesize_omp(benchmark::State& s) { run_synthesize(s, kernels::omp::synthesize); }
void BM_analyze_serial(benchmark::State& s) { run_analyze(s, kernels::serial::analyze); }
void BM_analyze_omp(benchmark::State& s) { run_analyze(s, kernels::omp::analyze); }
void BM_evaluate_serial(benchmark::State& s) { run_evaluate(s, kernels::serial::evaluate); }
void BM_evaluate_omp(benchmark::State& s) { run_evaluate(s, kernels::omp::evaluate); }
void BM_combo_serial(benchmark::State& s) { run_combo(s, kernels::serial::apply_combo); }
void BM_combo_omp(benchmark::State& s) { run_combo(s, kernels::omp::apply_combo); }
void BM_trace_serial(benchmark::State& s) { run_trace(s, kernels::serial::autocorrelation_trace); }
void BM_trace_omp(benchmark::State& s) { run_trace(s, kernels::omp::autocorrelation_trace); }

} // namespace

BENCHMARK(BM_synthesize_serial)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_synthesize_omp)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_analyze_serial)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_analyze_omp)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_serial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_evaluate_omp)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_combo_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_combo_omp)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_trace_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_trace_omp)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
