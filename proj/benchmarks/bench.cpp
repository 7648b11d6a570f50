#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "vxhaze/dehaze.hpp"
#include "vxhaze/metrics.hpp"
#include "vxhaze/reconstruction.hpp"
#include "vxhaze/render.hpp"
#include "vxhaze/synthesis.hpp"

using namespace vxhaze;

namespace {

const ProceduralScene& scene() {
  static const ProceduralScene s = [] {
    SceneSpec spec;
    spec.seed = 3;
    return make_procedural_scene(spec);
  }();
  return s;
}

std::vector<TrainingRay> rays(int n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<TrainingRay> out;
  while (static_cast<int>(out.size()) < n) {
    const Vec3 o = 3.0 * Vec3(u(rng), u(rng), u(rng)).normalized();
    TrainingRay tr;
    tr.ray.origin = o;
    tr.ray.direction = (0.5 * Vec3(u(rng), u(rng), u(rng)) - o).normalized();
    const auto hit = intersect(Aabb{}, o, tr.ray.direction);
    if (!hit) continue;
    tr.ray.t_near = hit->first;
    tr.ray.t_far = hit->second;
    tr.target = Rgb::Constant(0.5);
    out.push_back(tr);
  }
  return out;
}

void BM_CompositeRay(benchmark::State& state) {
  RenderConfig cfg;
  cfg.samples_per_ray = static_cast<int>(state.range(0));
  const auto r = rays(256);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(composite_color(scene().grid, r[i++ % r.size()].ray, cfg));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CompositeRay)->Arg(64)->Arg(128)->Arg(512);

void BM_RenderImage(benchmark::State& state) {
  RenderConfig cfg;
  cfg.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(render_image(scene().grid, scene().cameras[0], cfg));
  state.SetItemsProcessed(state.iterations() * 64 * 64);
}
BENCHMARK(BM_RenderImage)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_LossGradients(benchmark::State& state) {
  RenderConfig cfg;
  const auto r = rays(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradients(scene().grid, r, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossGradients)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

void BM_InjectHaze(benchmark::State& state) {
  const HazeField h = make_haze_field(HazeProfileKind::kUniform, haze_params_for_opacity(0.1, 0.25), 0);
  for (auto _ : state) benchmark::DoNotOptimize(inject_haze(scene().grid, h, Rgb::Constant(0.85)));
}
BENCHMARK(BM_InjectHaze)->Unit(benchmark::kMillisecond);

void BM_RemoveVoxels(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(remove_voxels(scene().grid, 0.2, 0.25));
}
BENCHMARK(BM_RemoveVoxels)->Unit(benchmark::kMillisecond);

void BM_Ssim(benchmark::State& state) {
  RenderConfig cfg;
  const ImageBuffer a = render_image(scene().grid, scene().cameras[0], cfg);
  const ImageBuffer b = render_image(scene().grid, scene().cameras[1], cfg);
  for (auto _ : state) benchmark::DoNotOptimize(ssim(a, b));
}
BENCHMARK(BM_Ssim);

void BM_Ciede2000(benchmark::State& state) {
  RenderConfig cfg;
  const ImageBuffer a = render_image(scene().grid, scene().cameras[0], cfg);
  const ImageBuffer b = render_image(scene().grid, scene().cameras[1], cfg);
  for (auto _ : state) benchmark::DoNotOptimize(ciede2000(a, b));
}
BENCHMARK(BM_Ciede2000);

}  // namespace

BENCHMARK_MAIN();
