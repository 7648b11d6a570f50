#include "vxhaze/reconstruction.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>

#include "render_detail.hpp"
#include "vxhaze/error.hpp"
#include "vxhaze/metrics.hpp"
#include "vxhaze/parallel.hpp"

namespace vxhaze {

namespace {

struct SampleRecord {
  Stencil stencil;
  double delta;
  double keep;
  double transmittance;
  Rgb color;
  bool inside;
};

struct Accumulator {
  double* density;
  double* color;
};

// Forward march of one ray recording what the backward pass needs.
double forward(const VoxelGrid& grid, const Ray& ray, const RenderConfig& cfg, std::uint64_t stream,
               std::vector<SampleRecord>& records, Rgb& color) {
  records.clear();
  color.setZero();
  if (ray.empty()) {
    color = cfg.background;
    return 1.0;
  }
  thread_local std::vector<double> offsets;
  detail::sample_offsets(cfg, stream, offsets);
  const int n = cfg.samples_per_ray;
  const double delta = (ray.t_far - ray.t_near) / n;
  const float* dens = grid.densities().data();
  const float* col = grid.colors().data();
  double transmittance = 1.0;
  for (int i = 0; i < n; ++i) {
    const double t = ray.t_near + (i + offsets[static_cast<std::size_t>(i)]) * delta;
    SampleRecord rec;
    rec.delta = delta;
    rec.transmittance = transmittance;
    const auto st = grid.stencil(ray.at(t));
    if (!st) {
      rec.inside = false;
      rec.keep = 1.0;
      rec.color.setZero();
      records.push_back(rec);
      continue;
    }
    rec.inside = true;
    rec.stencil = *st;
    double sigma = 0.0, r = 0.0, g = 0.0, b = 0.0;
    for (int c = 0; c < 8; ++c) {
      const std::size_t j = st->index[c];
      const double w = st->weight[c];
      sigma += w * dens[j];
      r += w * col[3 * j];
      g += w * col[3 * j + 1];
      b += w * col[3 * j + 2];
    }
    if (!std::isfinite(sigma) || !std::isfinite(r + g + b)) fail(ErrorCode::kCorruptGrid, "corrupt grid");
    rec.color = {r, g, b};
    rec.keep = std::exp(-sigma * delta);
    color += transmittance * (1.0 - rec.keep) * rec.color;
    records.push_back(rec);
    transmittance *= rec.keep;
    if (transmittance < cfg.early_stop) break;
  }
  color += transmittance * cfg.background;
  return transmittance;
}

// Back-propagates dL/dC through the recorded samples into the accumulators.
void backward(const std::vector<SampleRecord>& records, double t_end, const Rgb& d_color, const RenderConfig& cfg,
              Accumulator acc) {
  Rgb behind = t_end * cfg.background;
  for (std::size_t k = records.size(); k-- > 0;) {
    const SampleRecord& rec = records[k];
    if (!rec.inside) continue;
    const double alpha = 1.0 - rec.keep;
    const double w = rec.transmittance * alpha;
    const Rgb g_color = w * d_color;
    // d C / d sigma_i = delta_i (T_{i+1} c_i - radiance arriving from behind sample i)
    const double g_sigma = rec.delta * d_color.dot(rec.transmittance * rec.keep * rec.color - behind);
    for (int c = 0; c < 8; ++c) {
      const std::size_t j = rec.stencil.index[c];
      const double sw = rec.stencil.weight[c];
      acc.density[j] += sw * g_sigma;
      acc.color[3 * j] += sw * g_color.x();
      acc.color[3 * j + 1] += sw * g_color.y();
      acc.color[3 * j + 2] += sw * g_color.z();
    }
    behind += w * rec.color;
  }
}

double loss_and_gradients(const VoxelGrid& grid, std::span<const TrainingRay> rays, std::span<const std::uint32_t> batch,
                          const RenderConfig& cfg, std::vector<double>& g_density, std::vector<double>& g_color,
                          int threads) {
  const std::size_t n = batch.empty() ? rays.size() : batch.size();
  require(n > 0, ErrorCode::kInvalidArgument, "empty ray batch");
  const double inv = 1.0 / static_cast<double>(n);
  const int workers = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(n)));
  std::vector<std::vector<double>> extra_d(static_cast<std::size_t>(workers - 1));
  std::vector<std::vector<double>> extra_c(static_cast<std::size_t>(workers - 1));
  std::vector<double> partial(static_cast<std::size_t>(workers), 0.0);
  parallel_for(n, workers, [&](std::size_t begin, std::size_t end, int w) {
    double* gd = g_density.data();
    double* gc = g_color.data();
    if (w > 0) {
      extra_d[w - 1].assign(g_density.size(), 0.0);
      extra_c[w - 1].assign(g_color.size(), 0.0);
      gd = extra_d[w - 1].data();
      gc = extra_c[w - 1].data();
    }
    thread_local std::vector<SampleRecord> records;
    double sum = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t r = batch.empty() ? k : batch[k];
      const TrainingRay& tr = rays[r];
      Rgb color;
      const double t_end = forward(grid, tr.ray, cfg, r, records, color);
      const Rgb err = color - tr.target;
      sum += err.squaredNorm() / 3.0;
      backward(records, t_end, (2.0 / 3.0) * inv * err, cfg, {gd, gc});
    }
    partial[static_cast<std::size_t>(w)] = sum;
  });
  for (int w = 1; w < workers; ++w) {
    for (std::size_t i = 0; i < g_density.size(); ++i) g_density[i] += extra_d[w - 1][i];
    for (std::size_t i = 0; i < g_color.size(); ++i) g_color[i] += extra_c[w - 1][i];
  }
  return std::accumulate(partial.begin(), partial.end(), 0.0) * inv;
}

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double softplus_inverse(double y) { return y > 30.0 ? y : std::log(std::expm1(std::max(y, 1e-12))); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct AdamState {
  std::vector<float> m;
  std::vector<float> v;
  int step = 0;

  void reset(std::size_t n) {
    m.assign(n, 0.0f);
    v.assign(n, 0.0f);
    step = 0;
  }
};

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.99;
constexpr double kAdamEps = 1e-8;

std::vector<int> evenly_spaced(int n, int k) {
  std::vector<int> out;
  for (int j = 0; j < k; ++j) out.push_back(static_cast<int>((static_cast<long>(2 * j + 1) * n) / (2L * k)));
  return out;
}

}  // namespace

void FitConfig::validate() const {
  require(iterations >= 1, ErrorCode::kInvalidArgument, "iterations must be >= 1");
  require(batch >= 1, ErrorCode::kInvalidArgument, "batch must be >= 1");
  require(lr_density > 0.0 && lr_color > 0.0, ErrorCode::kInvalidArgument, "learning rates must be > 0");
  require(lr_final_fraction > 0.0 && lr_final_fraction <= 1.0, ErrorCode::kInvalidArgument,
          "lr_final_fraction must be in (0, 1]");
  require(!coarse_to_fine.empty(), ErrorCode::kInvalidArgument, "coarse_to_fine needs at least one size");
  for (int s : coarse_to_fine) require(s >= 2, ErrorCode::kInvalidArgument, "grid sizes must be >= 2");
  require(init_opacity > 0.0 && init_opacity < 1.0, ErrorCode::kInvalidArgument, "init_opacity must be in (0, 1)");
  require(tv_weight >= 0.0 && holdout >= 0 && checkpoint_every >= 1 && checkpoint_rays >= 1,
          ErrorCode::kInvalidArgument, "invalid fit schedule");
}

double photometric_loss(const VoxelGrid& grid, std::span<const TrainingRay> rays, const RenderConfig& cfg) {
  require(!rays.empty(), ErrorCode::kInvalidArgument, "empty ray batch");
  double sum = 0.0;
  for (std::size_t r = 0; r < rays.size(); ++r) {
    const Rgb c = composite_color(grid, rays[r].ray, cfg, r);
    sum += (c - rays[r].target).squaredNorm() / 3.0;
  }
  return sum / static_cast<double>(rays.size());
}

GridGradients loss_gradients(const VoxelGrid& grid, std::span<const TrainingRay> rays, const RenderConfig& cfg) {
  require(!rays.empty(), ErrorCode::kInvalidArgument, "empty ray batch");
  GridGradients g;
  g.density.assign(grid.voxel_count(), 0.0);
  g.color.assign(3 * grid.voxel_count(), 0.0);
  g.loss = loss_and_gradients(grid, rays, {}, cfg, g.density, g.color, cfg.threads);
  return g;
}

std::vector<TrainingRay> dataset_rays(const MultiViewDataset& dataset, std::span<const int> views,
                                      const RenderConfig& cfg) {
  std::vector<TrainingRay> rays;
  for (int v : views) {
    const View& view = dataset.views.at(static_cast<std::size_t>(v));
    for (int y = 0; y < view.image.height(); ++y) {
      for (int x = 0; x < view.image.width(); ++x) {
        rays.push_back({camera_ray_unchecked(view.camera, x, y, dataset.meta.bbox, cfg.bounds), view.image.at(x, y)});
      }
    }
  }
  return rays;
}

FitResult fit_grid(const MultiViewDataset& dataset, const FitConfig& fit_cfg, const RenderConfig& render_cfg) {
  fit_cfg.validate();
  render_cfg.validate();
  dataset.validate();
  const auto start = std::chrono::steady_clock::now();
  const int n_views = static_cast<int>(dataset.views.size());
  require(fit_cfg.holdout < n_views, ErrorCode::kInsufficientViews, "insufficient views: holdout uses every view");

  FitReport report;
  report.heldout_views = fit_cfg.holdout > 0 ? evenly_spaced(n_views, fit_cfg.holdout) : std::vector<int>{};
  for (int v = 0; v < n_views; ++v) {
    if (std::find(report.heldout_views.begin(), report.heldout_views.end(), v) == report.heldout_views.end()) {
      report.train_views.push_back(v);
    }
  }
  if (report.train_views.size() < 2) {
    fail(ErrorCode::kInsufficientViews,
         "insufficient views: fitting needs >= 2 training views, got " + std::to_string(report.train_views.size()));
  }

  const RenderConfig cfg = render_cfg;
  const int threads = fit_cfg.deterministic ? 1 : fit_cfg.threads;
  const std::vector<TrainingRay> rays = dataset_rays(dataset, report.train_views, cfg);
  std::mt19937_64 rng(fit_cfg.seed);

  std::vector<std::uint32_t> probe(rays.size());
  std::iota(probe.begin(), probe.end(), 0u);
  std::shuffle(probe.begin(), probe.end(), rng);
  probe.resize(std::min<std::size_t>(probe.size(), static_cast<std::size_t>(fit_cfg.checkpoint_rays)));
  std::sort(probe.begin(), probe.end());

  auto make_dims = [](int s) { return GridDims{s, s, s}; };
  VoxelGrid grid(make_dims(fit_cfg.coarse_to_fine.front()), dataset.meta.bbox);
  const double sigma0 = density_for_opacity(fit_cfg.init_opacity, cfg.reference_step);
  std::vector<double> param(grid.voxel_count(), softplus_inverse(sigma0));
  std::fill(grid.densities().begin(), grid.densities().end(), static_cast<float>(sigma0));
  std::fill(grid.colors().begin(), grid.colors().end(), 0.5f);

  AdamState adam_density, adam_color;
  adam_density.reset(grid.voxel_count());
  adam_color.reset(3 * grid.voxel_count());
  std::vector<double> g_density(grid.voxel_count()), g_color(3 * grid.voxel_count());

  const int stages = static_cast<int>(fit_cfg.coarse_to_fine.size());
  auto stage_end = [&](int s) { return static_cast<int>((static_cast<long>(s + 1) * fit_cfg.iterations) / stages); };
  int stage = 0;

  std::vector<std::uint32_t> batch(static_cast<std::size_t>(fit_cfg.batch));
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(rays.size() - 1));
  const std::vector<CameraModel> heldout_cams = [&] {
    std::vector<CameraModel> c;
    for (int v : report.heldout_views) c.push_back(dataset.views[static_cast<std::size_t>(v)].camera);
    return c;
  }();

  auto checkpoint = [&](int iteration) {
    FitCheckpoint cp;
    cp.iteration = iteration;
    double sum = 0.0;
    for (std::uint32_t r : probe) {
      const Rgb c = composite_color(grid, rays[r].ray, cfg, r);
      sum += (c - rays[r].target).squaredNorm() / 3.0;
    }
    cp.loss = sum / static_cast<double>(probe.size());
    if (!std::isfinite(cp.loss)) {
      const int last = report.checkpoints.empty() ? 0 : report.checkpoints.back().iteration;
      fail(ErrorCode::kDivergence, "divergence: non-finite loss at iteration " + std::to_string(iteration) +
                                       " (last good checkpoint at iteration " + std::to_string(last) + ")");
    }
    cp.train_psnr = cp.loss > 0.0 ? -10.0 * std::log10(cp.loss) : kPsnrInfinity;
    if (!heldout_cams.empty()) {
      RenderConfig rc = cfg;
      rc.threads = threads;
      double p = 0.0, s = 0.0;
      for (std::size_t k = 0; k < heldout_cams.size(); ++k) {
        const ImageBuffer img = render_image(grid, heldout_cams[k], rc);
        const ImageBuffer& ref = dataset.views[static_cast<std::size_t>(report.heldout_views[k])].image;
        p += std::min(psnr(img, ref), 100.0);
        s += ssim(img, ref);
      }
      cp.heldout_psnr = p / static_cast<double>(heldout_cams.size());
      cp.heldout_ssim = s / static_cast<double>(heldout_cams.size());
    }
    report.checkpoints.push_back(cp);
    if (fit_cfg.verbose) {
      std::fprintf(stderr, "[fit] iter %5d  dims %d  loss %.6f  train %.2f dB  heldout %.2f dB / %.4f\n", iteration,
                   grid.dims().nx, cp.loss, cp.train_psnr, cp.heldout_psnr, cp.heldout_ssim);
    }
  };

  const double decay = std::log(fit_cfg.lr_final_fraction);
  for (int it = 0; it < fit_cfg.iterations; ++it) {
    if (it == stage_end(stage) && stage + 1 < stages) {
      ++stage;
      grid = resample(grid, make_dims(fit_cfg.coarse_to_fine[static_cast<std::size_t>(stage)]));
      param.resize(grid.voxel_count());
      const auto dens = grid.densities();
      for (std::size_t i = 0; i < param.size(); ++i) param[i] = softplus_inverse(dens[i]);
      adam_density.reset(grid.voxel_count());
      adam_color.reset(3 * grid.voxel_count());
      g_density.assign(grid.voxel_count(), 0.0);
      g_color.assign(3 * grid.voxel_count(), 0.0);
    }
    if (it % fit_cfg.checkpoint_every == 0) checkpoint(it);

    for (auto& b : batch) b = pick(rng);
    std::fill(g_density.begin(), g_density.end(), 0.0);
    std::fill(g_color.begin(), g_color.end(), 0.0);
    const double loss = loss_and_gradients(grid, rays, batch, cfg, g_density, g_color, threads);
    if (!std::isfinite(loss)) {
      const int last = report.checkpoints.empty() ? 0 : report.checkpoints.back().iteration;
      fail(ErrorCode::kDivergence, "divergence: non-finite loss at iteration " + std::to_string(it) +
                                       " (last good checkpoint at iteration " + std::to_string(last) + ")");
    }

    if (fit_cfg.tv_weight > 0.0) {
      const GridDims d = grid.dims();
      const auto dens = grid.densities();
      const double w = 2.0 * fit_cfg.tv_weight / static_cast<double>(grid.voxel_count());
      for (int z = 0; z < d.nz; ++z) {
        for (int y = 0; y < d.ny; ++y) {
          for (int x = 0; x < d.nx; ++x) {
            const std::size_t i = grid.index(x, y, z);
            const std::size_t nbr[3] = {x + 1 < d.nx ? grid.index(x + 1, y, z) : i,
                                        y + 1 < d.ny ? grid.index(x, y + 1, z) : i,
                                        z + 1 < d.nz ? grid.index(x, y, z + 1) : i};
            for (std::size_t j : nbr) {
              const double diff = static_cast<double>(dens[i]) - dens[j];
              g_density[i] += w * diff;
              g_density[j] -= w * diff;
            }
          }
        }
      }
    }

    const double progress = static_cast<double>(it) / fit_cfg.iterations;
    const double lr_scale = std::exp(decay * progress);
    ++adam_density.step;
    ++adam_color.step;
    const double bc1d = 1.0 - std::pow(kBeta1, adam_density.step);
    const double bc2d = 1.0 - std::pow(kBeta2, adam_density.step);
    const double lr_d = fit_cfg.lr_density * lr_scale * std::sqrt(bc2d) / bc1d;
    auto dens = grid.densities();
    for (std::size_t i = 0; i < param.size(); ++i) {
      const double g = g_density[i] * sigmoid(param[i]);
      if (g == 0.0 && adam_density.m[i] == 0.0f) continue;
      const double m = kBeta1 * adam_density.m[i] + (1.0 - kBeta1) * g;
      const double v = kBeta2 * adam_density.v[i] + (1.0 - kBeta2) * g * g;
      adam_density.m[i] = static_cast<float>(m);
      adam_density.v[i] = static_cast<float>(v);
      param[i] -= lr_d * m / (std::sqrt(v) + kAdamEps);
      dens[i] = static_cast<float>(softplus(param[i]));
    }
    const double bc1c = 1.0 - std::pow(kBeta1, adam_color.step);
    const double bc2c = 1.0 - std::pow(kBeta2, adam_color.step);
    const double lr_c = fit_cfg.lr_color * lr_scale * std::sqrt(bc2c) / bc1c;
    auto col = grid.colors();
    for (std::size_t i = 0; i < col.size(); ++i) {
      const double g = g_color[i];
      if (g == 0.0 && adam_color.m[i] == 0.0f) continue;
      const double m = kBeta1 * adam_color.m[i] + (1.0 - kBeta1) * g;
      const double v = kBeta2 * adam_color.v[i] + (1.0 - kBeta2) * g * g;
      adam_color.m[i] = static_cast<float>(m);
      adam_color.v[i] = static_cast<float>(v);
      col[i] = static_cast<float>(std::clamp(col[i] - lr_c * m / (std::sqrt(v) + kAdamEps), 0.0, 1.0));
    }
  }
  checkpoint(fit_cfg.iterations);

  std::size_t occupied = 0;
  for (float s : grid.densities()) {
    if (opacity(s, cfg.reference_step) > 0.01) ++occupied;
  }
  report.occupied_fraction = static_cast<double>(occupied) / static_cast<double>(grid.voxel_count());
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(grid), std::move(report)};
}

}  // namespace vxhaze
