#include <array>

#include <benchmark/benchmark.h>

#include "vsheet/layer.hpp"

using namespace vsheet;

namespace {

std::vector<layer::LayerGrid> fourier_layers(int n_alpha) {
  const std::array<geometry::FourierMode, 1> modes{geometry::FourierMode{2, 0.1}};
  const br::SheetConfiguration config(
      {{geometry::make_fourier_curve(1.0, modes), br::constant_strength(1.0)}}, 0.0);
  return layer::build_layers(config, 0.02, {n_alpha, n_alpha, 16});
}

void BM_OnLayerParallel(benchmark::State &state) {
  const auto layers = fourier_layers(static_cast<int>(state.range(0)));
  const layer::LayerVelocity lv(layers);
  for (auto _ : state)
    benchmark::DoNotOptimize(lv.on_layer(0));
  state.SetItemsProcessed(state.iterations() * layers[0].points().size());
}

void BM_OnLayerSerial(benchmark::State &state) {
  const auto layers = fourier_layers(static_cast<int>(state.range(0)));
  const layer::LayerVelocity lv(layers);
  for (auto _ : state)
    benchmark::DoNotOptimize(lv.on_layer_serial(0));
  state.SetItemsProcessed(state.iterations() * layers[0].points().size());
}

} // namespace

BENCHMARK(BM_OnLayerParallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_OnLayerSerial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
