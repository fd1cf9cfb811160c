#include <benchmark/benchmark.h>

#include <random>

#include "acc/imaging.hpp"
#include "acc/morphology.hpp"
#include "acc/pipeline.hpp"
#include "acc/synth.hpp"

using namespace acc;

namespace {

GrayPlane noisy_plane(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GrayPlane p(n, n);
  for (double& v : p.storage()) v = u(rng);
  return imaging::gaussian_filter(p, 2.0, 2.0);
}

synth::SynthDish dish(int size, int colonies) {
  synth::SynthSpec s;
  s.width = size;
  s.height = size;
  s.colonies = colonies;
  s.overlap = 0.1;
  s.seed = 3;
  return synth::generate(s);
}

void BM_ReconstructByDilation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GrayPlane mask = noisy_plane(n, 1);
  const GrayPlane marker = morph::erode(mask, morph::StructuringElement::disk(5));
  for (auto _ : state) benchmark::DoNotOptimize(morph::reconstruct_by_dilation(marker, mask));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_ReconstructByDilation)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_OpenCloseByReconstruction(benchmark::State& state) {
  const GrayPlane p = noisy_plane(static_cast<int>(state.range(0)), 2);
  const auto se = morph::StructuringElement::disk(30);
  for (auto _ : state) benchmark::DoNotOptimize(morph::open_close_by_reconstruction(p, se));
}
BENCHMARK(BM_OpenCloseByReconstruction)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_DistanceTransform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BinaryMask m = dish(n, n / 20).gt_mask;
  for (auto _ : state) benchmark::DoNotOptimize(morph::distance_transform(m));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_DistanceTransform)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_Watershed(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BinaryMask m = dish(n, n / 20).gt_mask;
  const DistanceMap d = morph::distance_transform(m);
  GrayPlane topo(n, n);
  for (std::size_t i = 0; i < topo.size(); ++i) topo[i] = -d[i];
  const BinaryMask markers = morph::extended_minima(topo, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(morph::marker_watershed(topo, markers, m));
}
BENCHMARK(BM_Watershed)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ProcessSyntheticDish(benchmark::State& state) {
  const auto d = dish(640, 40);
  const auto cfg = pipeline::parse_config(
      "[blobs]\npca_sigma_x = 2\npca_sigma_y = 2\nr_obrcbr = 30\n"
      "[segmentation]\ngray_sigma_x = 2\ngray_sigma_y = 2\na_min = 100\na_max = 1000\n");
  for (auto _ : state) benchmark::DoNotOptimize(pipeline::process(d.image, cfg, "bench").summary.colony_count);
}
BENCHMARK(BM_ProcessSyntheticDish)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
