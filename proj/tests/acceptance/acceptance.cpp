// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Pass criterion numbers as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vxhaze/dehaze.hpp"
#include "vxhaze/experiments.hpp"
#include "vxhaze/metrics.hpp"
#include "vxhaze/reconstruction.hpp"
#include "vxhaze/render.hpp"
#include "vxhaze/synthesis.hpp"

namespace fs = std::filesystem;
using namespace vxhaze;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Random ray from a sphere of radius 3 through a point inside the unit box,
// clipped to the box.
Ray random_box_ray(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Vec3 o = 3.0 * Vec3(u(rng), u(rng), u(rng)).normalized();
    const Vec3 target = 0.8 * Vec3(u(rng), u(rng), u(rng));
    Ray r;
    r.origin = o;
    r.direction = (target - o).normalized();
    const auto hit = intersect(Aabb{}, o, r.direction);
    if (!hit || hit->second - hit->first < 1e-3) continue;
    r.t_near = hit->first;
    r.t_far = hit->second;
    return r;
  }
}

FitConfig pipeline_fit(std::uint64_t seed) {
  FitConfig f;
  f.iterations = 1000;
  f.batch = 4096;
  f.lr_density = 0.1;
  f.lr_color = 0.02;
  f.coarse_to_fine = {22, 64};
  f.seed = seed;
  return f;
}

SynthConfig scene(std::uint64_t seed, double haze) {
  SynthConfig c;
  c.scene.seed = seed;
  c.haze_opacity = haze;
  return c;
}

std::vector<ImageBuffer> images_of(const MultiViewDataset& ds) {
  std::vector<ImageBuffer> out;
  for (const View& v : ds.views) out.push_back(v.image);
  return out;
}

// 1. Layered grids: density varies along one axis only, constant over runs of
// nodes with one-cell linear ramps between runs. Along any ray the optical
// depth is the sum over node cells of (length in cell) * (sigma at the middle
// of that length), which is exact for a linear ramp.
Outcome renderer_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> run_len(1, 6), axis_pick(0, 2);
  std::uniform_real_distribution<double> level(0.0, 3.0);
  RenderConfig cfg;
  cfg.samples_per_ray = 512;
  double worst_t = 0.0;
  for (int g = 0; g < 100; ++g) {
    const int n = 24;
    const int axis = axis_pick(rng);
    std::vector<double> layer(n);
    for (int i = 0; i < n;) {
      const double v = level(rng);
      for (int k = run_len(rng); k > 0 && i < n; --k) layer[static_cast<std::size_t>(i++)] = v;
    }
    VoxelGrid grid({n, n, n}, {});
    for (int z = 0; z < n; ++z)
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
          const int idx[3] = {x, y, z};
          grid.set_density(grid.index(x, y, z), static_cast<float>(layer[static_cast<std::size_t>(idx[axis])]));
        }
    const double h = 2.0 / (n - 1);
    auto sigma_at = [&](double coord) {
      const double s = std::clamp((coord + 1.0) / h, 0.0, n - 1.0);
      const int i = std::min(static_cast<int>(s), n - 2);
      const double f = s - i;
      return (1 - f) * static_cast<float>(layer[static_cast<std::size_t>(i)]) +
             f * static_cast<float>(layer[static_cast<std::size_t>(i + 1)]);
    };
    for (int k = 0; k < 5; ++k) {
      const Ray r = random_box_ray(rng);
      const double dir = r.direction[axis];
      std::vector<MediumSegment> segs;
      // Cut the parameter range at every node plane the ray crosses.
      std::vector<double> cuts = {r.t_near, r.t_far};
      if (std::abs(dir) > 1e-12) {
        for (int i = 0; i < n; ++i) {
          const double t = (-1.0 + i * h - r.origin[axis]) / dir;
          if (t > r.t_near && t < r.t_far) cuts.push_back(t);
        }
      }
      std::sort(cuts.begin(), cuts.end());
      for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        const double mid = r.at(0.5 * (cuts[j] + cuts[j + 1]))[axis];
        segs.push_back({cuts[j + 1] - cuts[j], sigma_at(mid)});
      }
      const double expected = analytic_transmittance(segs);
      const double got = composite_ray(grid, r, cfg).trace.final_transmittance;
      worst_t = std::max(worst_t, std::abs(got - expected));
    }
  }

  // Homogeneous medium in closed form.
  double worst_c = 0.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double sigma = 4.0 * u(rng);
    const Rgb c(u(rng), u(rng), u(rng));
    cfg.background = {u(rng), u(rng), u(rng)};
    VoxelGrid grid({4, 4, 4}, {});
    for (std::size_t i = 0; i < grid.voxel_count(); ++i) {
      grid.set_density(i, static_cast<float>(sigma));
      grid.set_color(i, c);
    }
    const Ray r = random_box_ray(rng);
    const double s = static_cast<float>(sigma);
    const Rgb cf = grid.color(0);
    const double T = std::exp(-s * (r.t_far - r.t_near));
    const Rgb expected = (1.0 - T) * cf + T * cfg.background;
    worst_c = std::max(worst_c, (composite_color(grid, r, cfg) - expected).cwiseAbs().maxCoeff());
  }
  return {worst_t <= 1e-4 && worst_c <= 1e-4,
          format("max |T - analytic| %.2e over 500 rays, max closed-form colour error %.2e", worst_t, worst_c)};
}

// 2. Haze baked into a vacuum grid versus direct quadrature of the medium.
Outcome vre_equivalence() {
  std::mt19937_64 rng(202);
  const Rgb ambient = Rgb::Constant(0.85);
  RenderConfig cfg;
  cfg.samples_per_ray = 512;
  cfg.background = {0.3, 0.35, 0.45};
  double worst = 0.0;
  const HazeProfileKind kinds[] = {HazeProfileKind::kUniform, HazeProfileKind::kHeightExponential,
                                   HazeProfileKind::kLocalBlob};
  int rays = 0;
  for (HazeProfileKind kind : kinds) {
    HazeParams p = haze_params_for_opacity(0.15, 0.25, 0.9);
    p.emission = {0.75, 0.78, 0.82};
    const HazeField h = make_haze_field(kind, p, 7);
    const VoxelGrid baked = inject_haze(VoxelGrid({64, 64, 64}, {}), h, ambient);
    const int count = kind == HazeProfileKind::kUniform ? 18 : 16;
    for (int k = 0; k < count; ++k, ++rays) {
      const Ray r = random_box_ray(rng);
      const Rgb a = composite_color(baked, r, cfg);
      const Rgb b = rte_reference_radiance(h, r, ambient, cfg);
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-3 && rays == 50, format("max channel difference %.2e over %d rays", worst, rays)};
}

// 3. Central differences against the analytic backward pass.
Outcome gradient_check() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int checked = 0;
  for (int rep = 0; rep < 20; ++rep) {
    VoxelGrid g({8, 8, 8}, {});
    for (std::size_t i = 0; i < g.voxel_count(); ++i) {
      g.set_density(i, static_cast<float>(3.0 * u(rng)));
      g.set_color(i, {u(rng), u(rng), u(rng)});
    }
    std::vector<TrainingRay> rays;
    for (int k = 0; k < 10; ++k) rays.push_back({random_box_ray(rng), {u(rng), u(rng), u(rng)}});
    RenderConfig cfg;
    cfg.samples_per_ray = 64;
    cfg.background = {u(rng), u(rng), u(rng)};
    const GridGradients gg = loss_gradients(g, rays, cfg);

    double scale = 0.0;
    for (double d : gg.density) scale = std::max(scale, std::abs(d));
    for (double c : gg.color) scale = std::max(scale, std::abs(c));
    const double floor = 1e-4 * scale;

    auto fd = [&](VoxelGrid& plus, VoxelGrid& minus, double h) {
      return (photometric_loss(plus, rays, cfg) - photometric_loss(minus, rays, cfg)) / h;
    };
    int taken = 0;
    for (std::size_t i = 0; i < g.voxel_count() && taken < 12; ++i) {
      if (std::abs(gg.density[i]) <= floor && std::abs(gg.color[3 * i]) <= floor) continue;
      ++taken;
      VoxelGrid plus = g, minus = g;
      plus.set_density(i, g.density(i) + 1e-3f);
      minus.set_density(i, std::max(0.0f, g.density(i) - 1e-3f));
      const double n = fd(plus, minus, static_cast<double>(plus.density(i)) - minus.density(i));
      worst = std::max(worst, std::abs(n - gg.density[i]) / std::max({std::abs(n), std::abs(gg.density[i]), floor}));

      for (int ch = 0; ch < 3; ++ch) {
        plus = g;
        minus = g;
        Rgb cp = g.color(i), cm = g.color(i);
        cp[ch] += 1e-3;
        cm[ch] -= 1e-3;
        plus.set_color(i, cp);
        minus.set_color(i, cm);
        const double nc = fd(plus, minus, static_cast<double>(plus.color(i)[ch]) - minus.color(i)[ch]);
        const double ac = gg.color[3 * i + static_cast<std::size_t>(ch)];
        worst = std::max(worst, std::abs(nc - ac) / std::max({std::abs(nc), std::abs(ac), floor}));
      }
      checked += 4;
    }
  }
  return {worst < 1e-3 && checked > 0, format("max relative error %.2e over %d partials", worst, checked)};
}

// 4. Partial sums of the multiple-scattering series.
Outcome scattering_series() {
  bool ok = true;
  std::string detail;
  for (double f : {0.1, 0.5, 0.9}) {
    const double gain = steady_state_gain(f);
    int n = 0;
    while (std::abs(iterate_scatter(1.0, f, n) - gain) >= 1e-6 && n < 10000) ++n;
    // Once inside the tolerance the sums must stay there and keep approaching.
    double prev = std::abs(iterate_scatter(1.0, f, n) - gain);
    for (int m = n + 1; m < n + 200; ++m) {
      const double e = std::abs(iterate_scatter(1.0, f, m) - gain);
      ok = ok && e < 1e-6 && e <= prev;
      prev = e;
    }
    ok = ok && n < 10000;
    detail += format("f_ms %.1f within 1e-6 after %d terms; ", f, n + 1);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// 5. Full pipeline on a haze-free scene.
Outcome no_haze_robustness() {
  const SynthConfig sc = scene(5, 0.0);
  const SynthOutput s = synthesize(sc);
  const RenderConfig rc = sc.render_config();
  const DehazeResult r = dehaze_pipeline(s.clean, pipeline_fit(5), rc, DehazeOptions{});
  const double p = pooled_psnr(r.images, images_of(s.clean));
  const double removed = r.report.removed_opaque_fraction;
  return {p >= 30.0 && removed < 0.01,
          format("output vs input %.2f dB, removed %.3f%% of voxels with alpha > 0.5 (threshold %.4f)", p,
                 100.0 * removed, r.report.selected_threshold)};
}

// 6. Dehazing gain over three seeded uniform-haze scenes.
Outcome dehazing_gain() {
  const std::uint64_t seeds[] = {11, 12, 13};
  const double levels[] = {0.05, 0.075, 0.1};
  double hazy_sum = 0.0, dehazed_sum = 0.0;
  std::string per;
  for (int i = 0; i < 3; ++i) {
    SynthConfig sc = scene(seeds[i], levels[i]);
    const SynthOutput s = synthesize(sc);
    const RenderConfig rc = sc.render_config();
    const auto gt = images_of(s.clean);
    const DehazeResult r = dehaze_pipeline(s.hazy, pipeline_fit(seeds[i]), rc, DehazeOptions{});
    const double hazy = pooled_psnr(images_of(s.hazy), gt);
    const double dehazed = pooled_psnr(r.images, gt);
    hazy_sum += hazy;
    dehazed_sum += dehazed;
    per += format("[seed %d alpha %.3f: %.2f -> %.2f] ", static_cast<int>(seeds[i]), levels[i], hazy, dehazed);
  }
  const double gain = (dehazed_sum - hazy_sum) / 3.0;
  return {gain >= 4.0, format("mean gain %.2f dB ", gain) + per};
}

// 7. Plateau selection against the ground-truth optimum.
Outcome threshold_selection() {
  const double levels[] = {0.02, 0.05, 0.1, 0.2};
  const auto rows = run_threshold_experiment(scene(21, 0.0), levels, pipeline_fit(21), DehazeOptions{});
  bool ok = rows.size() == 4;
  std::string per;
  for (const ThresholdLevel& r : rows) {
    const bool good = r.best_gt_psnr - r.selected_gt_psnr <= 1.0 && r.report.three_phase;
    ok = ok && good;
    per += format("[alpha %.2f: selected %.4f %.2f dB, best %.4f %.2f dB, three-phase %s] ", r.haze_opacity,
                  r.report.selected_threshold, r.selected_gt_psnr, r.best_gt_threshold, r.best_gt_psnr,
                  r.report.three_phase ? "yes" : "no");
  }
  return {ok, per};
}

// 8. Dehaze quality against the number of input views.
Outcome image_count_trend() {
  SynthConfig sc = scene(31, 0.1);
  const SynthOutput s = synthesize(sc);
  const int counts[] = {4, 6, 8, 10, 16, 20};
  const auto rows = run_imagecount(s.hazy, counts, pipeline_fit(31), DehazeOptions{});
  bool monotone = true;
  std::string per;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].dehaze_psnr < rows[i - 1].dehaze_psnr - 0.5) monotone = false;
    per += format("%d:%.2f ", rows[i].views, rows[i].dehaze_psnr);
  }
  const double gain = rows.back().dehaze_psnr - rows.front().dehaze_psnr;
  return {monotone && gain >= 2.0, format("dehaze PSNR by views %s(20 vs 4: %+.2f dB)", per.c_str(), gain)};
}

// 9. Colour-difference vectors and identity cases.
Outcome metric_conformance() {
  std::ifstream in(std::string(VXHAZE_TEST_DATA) + "/ciede2000_pairs.txt");
  if (!in) return {false, "missing ciede2000_pairs.txt"};
  std::string line;
  double worst = 0.0;
  int pairs = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    Lab a, b;
    double expected = 0.0;
    s >> a.l >> a.a >> a.b >> b.l >> b.a >> b.b >> expected;
    worst = std::max(worst, std::abs(delta_e2000(a, b) - expected));
    ++pairs;
  }
  ImageBuffer img(32, 24);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 32; ++x) img.set(x, y, {u(rng), u(rng), u(rng)});
  const MetricTriple m = compare(img, img);
  const bool identity = std::isinf(m.psnr) && m.psnr > 0 && m.ssim == 1.0 && m.ciede2000 == 0.0;
  return {worst <= 1e-4 && pairs == 34 && identity,
          format("%d CIEDE2000 pairs, max error %.2e; identical images give PSNR %s, SSIM %.1f", pairs, worst,
                 std::isinf(m.psnr) ? "inf" : "finite", m.ssim)};
}

// 10. Every CLI stage run twice with the same seed in deterministic mode.
Outcome determinism() {
#ifndef VXHAZE_CLI
  return {false, "command-line tool not built"};
#else
  const fs::path root = fs::temp_directory_path() / "vxhaze_acceptance_determinism";
  fs::remove_all(root);
  const std::string scene_args = "--views 8 --dims 32 --width 32 --height 32 --haze uniform:0.1";
  const std::string fit_args = "--iters 150 --batch 2048 --coarse2fine 16,32";
  auto run_all = [&](const fs::path& dir) {
    const std::string cli = std::string(VXHAZE_CLI) + " --seed 4 --deterministic --threads 2 --out ";
    const std::string d = dir.string();
    const std::string cmds[] = {
        cli + d + "/synth synth " + scene_args,
        cli + d + "/fit fit --dataset " + d + "/synth/hazy " + fit_args,
        cli + d + "/render render --dataset " + d + "/synth/hazy --grid " + d + "/fit/grid.vx",
        cli + d + "/dehaze dehaze --dataset " + d + "/synth/hazy --grid " + d + "/fit/grid.vx --sweep-views 4",
        cli + d + "/eval eval --ref " + d + "/synth/clean --test " + d + "/dehaze/after",
        cli + d + "/imagecount exp-imagecount --dataset " + d + "/synth/hazy --counts 4,8 --sweep-views 4 " + fit_args,
        cli + d + "/threshold exp-threshold " + scene_args + " --levels 0.05,0.1 --sweep-views 4 " + fit_args,
    };
    for (const std::string& c : cmds) {
      if (std::system((c + " > /dev/null 2>&1").c_str()) != 0) return false;
    }
    return true;
  };
  if (!run_all(root / "a") || !run_all(root / "b")) return {false, "a pipeline stage failed to run"};

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  int files = 0, differ = 0;
  std::string first;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file() || e.path().filename() == "run_manifest.json") continue;
    ++files;
    const fs::path other = root / "b" / fs::relative(e.path(), root / "a");
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) {
      if (differ++ == 0) first = fs::relative(e.path(), root / "a").string();
    }
  }
  fs::remove_all(root);
  return {differ == 0 && files > 0,
          format("%d output files over 7 stages, %d differ%s%s", files, differ, differ ? ", first " : "", first.c_str())};
#endif
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "renderer oracle", 60, renderer_oracle},
      {2, "baked haze equivalence", 60, vre_equivalence},
      {3, "gradient check", 60, gradient_check},
      {4, "scattering series", 1, scattering_series},
      {5, "no-haze robustness", 20 * 60, no_haze_robustness},
      {6, "dehazing gain", 60 * 60, dehazing_gain},
      {7, "threshold selection", 30 * 60, threshold_selection},
      {8, "image-count trend", 2 * 60 * 60, image_count_trend},
      {9, "metric conformance", 1, metric_conformance},
      {10, "determinism", 30 * 60, determinism},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d (%s): %s; %.1f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
