// Parallel kernels against the serial reference implementations.
#include <benchmark/benchmark.h>

#include "winsim/analysis.hpp"
#include "winsim/config.hpp"
#include "winsim/reference.hpp"
#include "winsim/window_frontend.hpp"

using namespace winsim;

namespace {

constexpr double kT = 50e-12;
constexpr int kL = 8;

PulseShape led() { return PulseShape::led(kT, kT / 20); }

std::vector<double> amplitudes(std::size_t n) { return generate_symbols(n, 1, kT, 1).amplitudes(); }

void BM_RenderParallel(benchmark::State& st) {
  const auto a = amplitudes(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(render_amplitudes(a, led(), 32));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_RenderReference(benchmark::State& st) {
  const auto a = amplitudes(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::render_amplitudes(a, led(), 32));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

template <bool Parallel>
void BM_SampleWindow(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const auto x = render_amplitudes(amplitudes(n), led(), 32);
  const auto bank = hadamard_bank(kL, kT);
  const auto clock = realize_clock(n + 1, kT, bank.frame_period(), 0.05, 2, {0.0, kL});
  const NoiseSpec noise{1e-3 * kT, 3};
  const QuantizerSpec q{8, window_default_range(1, bank.frame_period()), Overload::Unbounded};
  for (auto _ : st) {
    if constexpr (Parallel) benchmark::DoNotOptimize(sample_window(x, bank, clock, noise, q));
    else benchmark::DoNotOptimize(reference::sample_window(x, bank, clock, noise, q));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SweepExpA(benchmark::State& st) {
  auto cfg = load_preset("exp_a");
  cfg.sweep.min_trials = cfg.sweep.max_trials = 4;
  for (auto _ : st) benchmark::DoNotOptimize(run_sweep(cfg));
}

}  // namespace

BENCHMARK(BM_RenderParallel)->Arg(4096)->Arg(65536)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenderReference)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleWindow<true>)->Arg(4096)->Arg(65536)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleWindow<false>)->Arg(4096)->Arg(65536)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepExpA)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
