#include <benchmark/benchmark.h>

#include <random>

#include "pvt/denoise.hpp"
#include "pvt/dofp.hpp"
#include "pvt/flow.hpp"
#include "pvt/synth.hpp"

namespace {

pvt::Image noise_image(int c, int h, int w, unsigned seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  pvt::Image img(c, h, w);
  for (double& v : img.values()) v = u(rng);
  return img;
}

void BM_ApplyForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  pvt::PolarFrame x;
  for (int d = 0; d < 4; ++d) x.dirs[d] = noise_image(3, n, n, d);
  const auto layout = pvt::MosaicLayout::imx250myr();
  for (auto _ : state) benchmark::DoNotOptimize(pvt::apply_forward(x, layout));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_ApplyForward)->Arg(256)->Arg(512);

void BM_PseudoInverse(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const pvt::MosaicFrame y{noise_image(1, n, n, 7), pvt::MosaicLayout::imx250myr()};
  for (auto _ : state) benchmark::DoNotOptimize(pvt::pseudo_inverse(y));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_PseudoInverse)->Arg(256)->Arg(512);

void BM_SoftmaxSplat(benchmark::State& state) {
  const int n = 256;
  const int threads = static_cast<int>(state.range(0));
  const pvt::Image img = noise_image(3, n, n, 8);
  const pvt::FlowField m{noise_image(1, n, n, 9, -3.0, 3.0), noise_image(1, n, n, 10, -3.0, 3.0)};
  for (auto _ : state) benchmark::DoNotOptimize(pvt::softmax_splat(img, m, threads));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_SoftmaxSplat)->Arg(1)->Arg(4)->UseRealTime();

void BM_GuidedFilter(benchmark::State& state) {
  const int n = 256;
  const int radius = static_cast<int>(state.range(0));
  const pvt::Image guide = noise_image(1, n, n, 11);
  const pvt::Image src = noise_image(1, n, n, 12, -0.2, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(pvt::guided_filter(guide, src, radius, 1e-3));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_GuidedFilter)->Arg(2)->Arg(8);

void BM_HornSchunck(benchmark::State& state) {
  const pvt::SceneSpec s = pvt::preset_scene("translating-patches");
  const pvt::Image i0 = pvt::render_params(s, 0).i;
  const pvt::Image i1 = pvt::render_params(s, 1).i;
  const pvt::HornSchunckConfig cfg{0.05, static_cast<int>(state.range(0)), 3};
  for (auto _ : state) benchmark::DoNotOptimize(pvt::estimate_flow_hs(i0, i1, cfg));
}
BENCHMARK(BM_HornSchunck)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
