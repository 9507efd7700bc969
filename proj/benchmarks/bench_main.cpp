#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "radarnet/fft.hpp"
#include "radarnet/network.hpp"
#include "radarnet/radar_model.hpp"
#include "radarnet/scenario.hpp"
#include "radarnet/spectrogram.hpp"

using namespace radarnet;

namespace {

std::vector<float> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> d;
  std::vector<float> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

void BM_FftModulus(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto w = noise(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(fft_modulus(w, n));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FftModulus)->Arg(256)->Arg(512)->Arg(1024);

// Scenario draw, beat synthesis and STFT stacking of one vehicle pass.
void BM_SignalToTensor(benchmark::State& state) {
  const RadarParams p;
  const auto cls = class_from_index(static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const BeatSignal sig = synthesize_beat_signal(sample_vehicle_scenario(cls, seed++), p);
    benchmark::DoNotOptimize(signal_to_tensor(sig, p, {}));
  }
}
BENCHMARK(BM_SignalToTensor)->DenseRange(0, 5)->Unit(benchmark::kMillisecond);

void BM_MiniForward(benchmark::State& state) {
  const auto net = nn::build_network<float>(nn::Preset::Mini, {3, 257, 32}, 6, 1);
  const auto x = noise(3 * 257 * 32, 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, nn::Mode::Eval));
}
BENCHMARK(BM_MiniForward)->Unit(benchmark::kMillisecond);

void BM_MiniForwardBackward(benchmark::State& state) {
  const auto net = nn::build_network<float>(nn::Preset::Mini, {3, 257, 32}, 6, 1);
  const auto x = noise(3 * 257 * 32, 2);
  auto grads = net.zero_buffers();
  for (auto _ : state) {
    const auto cache = net.forward(x, nn::Mode::Train, 7);
    const auto lg = nn::loss_and_grad(cache.probabilities(), 3);
    const std::vector<float> d(lg.d_logits.begin(), lg.d_logits.end());
    net.backward_into(cache, d, grads);
  }
}
BENCHMARK(BM_MiniForwardBackward)->Unit(benchmark::kMillisecond);

void BM_FullForward(benchmark::State& state) {
  const auto net = nn::build_network<float>(nn::Preset::Full, {3, 227, 227}, 6, 1);
  const auto x = noise(3 * 227 * 227, 2);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x, nn::Mode::Eval));
}
BENCHMARK(BM_FullForward)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
