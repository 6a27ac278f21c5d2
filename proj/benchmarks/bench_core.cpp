#include <benchmark/benchmark.h>

#include "skelgait/adjacency.hpp"
#include "skelgait/angle_features.hpp"
#include "skelgait/gait_stats.hpp"
#include "skelgait/network.hpp"
#include "skelgait/preprocess.hpp"
#include "skelgait/skepxel.hpp"
#include "skelgait/synth.hpp"

using namespace skelgait;

namespace {

SkeletonSequence walker(std::size_t frames) {
  SynthConfig cfg;
  cfg.n_td = 1;
  cfg.n_asd = 0;
  cfg.frames = frames;
  return synthesize(cfg).sequences.front();
}

void BM_MultiscaleAdjacency(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_multiscale_adjacency(default_topology(), k));
}
BENCHMARK(BM_MultiscaleAdjacency)->Arg(2)->Arg(4);

void BM_AnglePipeline(benchmark::State& state) {
  const auto seq = walker(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(angle_pipeline(seq));
}
BENCHMARK(BM_AnglePipeline)->Arg(40)->Arg(400);

void BM_Preprocess(benchmark::State& state) {
  const auto seq = walker(static_cast<std::size_t>(state.range(0)));
  PreprocessConfig cfg;
  cfg.apply_rotation = true;
  for (auto _ : state) benchmark::DoNotOptimize(preprocess_sequence(seq, cfg));
}
BENCHMARK(BM_Preprocess)->Arg(40)->Arg(400);

void BM_Forward(benchmark::State& state) {
  NetworkConfig cfg;
  const auto net = make_network(cfg);
  const auto x = network_input(walker(40), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(forward_network(net, x));
}
BENCHMARK(BM_Forward);

void BM_LossAndGradient(benchmark::State& state) {
  NetworkConfig cfg;
  const auto net = make_network(cfg);
  auto grad = zeros_like(net);
  const auto x = network_input(walker(40), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(net, x, Label::ASD, nullptr, &grad));
}
BENCHMARK(BM_LossAndGradient);

void BM_SkepxelImage(benchmark::State& state) {
  const auto seq = walker(40);
  for (auto _ : state) benchmark::DoNotOptimize(build_image(seq, SkepxelConfig{}));
}
BENCHMARK(BM_SkepxelImage);

void BM_GaitReport(benchmark::State& state) {
  const auto seq = walker(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gait_report(seq));
}
BENCHMARK(BM_GaitReport)->Arg(40)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
