#include "vxhaze/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <string>

#include "vxhaze/error.hpp"
#include "vxhaze/metrics.hpp"

namespace vxhaze {

RenderConfig SynthConfig::render_config() const {
  RenderConfig rc;
  rc.background = background;
  rc.reference_step = reference_step;
  rc.samples_per_ray = samples_per_ray;
  rc.threads = threads;
  rc.validate();
  return rc;
}

HazeField SynthConfig::haze_field() const {
  require(haze_opacity >= 0.0 && haze_opacity < 1.0, ErrorCode::kInvalidArgument, "haze opacity must be in [0, 1)");
  HazeParams p = haze_params_for_opacity(haze_opacity, reference_step, haze_albedo);
  p.emission = haze_emission;
  p.multiscatter_retention = multiscatter_retention;
  return make_haze_field(haze_kind, p, scene.seed);
}

std::string SynthConfig::haze_label() const {
  if (haze_opacity == 0.0) return "none";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", haze_opacity);
  return std::string(to_string(haze_kind)) + ":" + buf;
}

void SynthConfig::set_haze(const std::string& spec) {
  if (spec == "none" || spec.empty()) {
    haze_opacity = 0.0;
    return;
  }
  const auto colon = spec.find(':');
  require(colon != std::string::npos, ErrorCode::kInvalidArgument,
          "haze must be 'none' or '<kind>:<opacity>', got '" + spec + "'");
  haze_kind = parse_haze_profile(spec.substr(0, colon));
  double value = 0.0;
  try {
    std::size_t used = 0;
    value = std::stod(spec.substr(colon + 1), &used);
    require(used == spec.size() - colon - 1, ErrorCode::kInvalidArgument, "trailing characters in haze opacity");
  } catch (const std::logic_error&) {
    fail(ErrorCode::kInvalidArgument, "bad haze opacity in '" + spec + "'");
  }
  require(value >= 0.0 && value < 1.0, ErrorCode::kInvalidArgument, "haze opacity must be in [0, 1)");
  haze_opacity = value;
}

namespace {

MultiViewDataset make_dataset(const std::vector<CameraModel>& cameras, std::vector<ImageBuffer> images,
                              const VoxelGrid& truth, const SynthConfig& cfg, const std::string& haze) {
  MultiViewDataset ds;
  for (std::size_t i = 0; i < cameras.size(); ++i) ds.views.push_back({cameras[i], std::move(images[i])});
  ds.ground_truth = truth;
  ds.meta.scene_id = "procedural-" + std::to_string(cfg.scene.seed);
  ds.meta.haze_kind = haze;
  ds.meta.seed = cfg.scene.seed;
  ds.meta.bbox = truth.bbox();
  ds.meta.background = cfg.background;
  ds.meta.reference_step = cfg.reference_step;
  ds.meta.samples_per_ray = cfg.samples_per_ray;
  return ds;
}

}  // namespace

SynthOutput synthesize(const SynthConfig& cfg) {
  const RenderConfig rc = cfg.render_config();
  ProceduralScene scene = make_procedural_scene(cfg.scene);
  const HazeField haze = cfg.haze_field();
  VoxelGrid hazy = inject_haze(scene.grid, haze, cfg.ambient);
  auto clean_images = render_views(scene.grid, scene.cameras, rc);
  auto hazy_images = render_views(hazy, scene.cameras, rc);
  SynthOutput out{scene.grid, std::move(hazy), haze, {}, {}};
  out.clean = make_dataset(scene.cameras, std::move(clean_images), scene.grid, cfg, "none");
  out.hazy = make_dataset(scene.cameras, std::move(hazy_images), scene.grid, cfg, cfg.haze_label());
  return out;
}

RenderConfig render_config_for(const DatasetMeta& meta, int threads) {
  RenderConfig rc;
  rc.background = meta.background;
  rc.reference_step = meta.reference_step;
  rc.samples_per_ray = meta.samples_per_ray;
  rc.threads = threads;
  rc.validate();
  return rc;
}

std::vector<ImageBuffer> ground_truth_images(const MultiViewDataset& dataset, const RenderConfig& cfg) {
  require(dataset.ground_truth.has_value(), ErrorCode::kMissingFile, "dataset has no ground-truth grid");
  std::vector<CameraModel> cams;
  for (const View& v : dataset.views) cams.push_back(v.camera);
  return render_views(*dataset.ground_truth, cams, cfg);
}

std::vector<int> spread_indices(int n, int k) {
  require(k >= 1 && k <= n, ErrorCode::kInvalidArgument,
          "cannot pick " + std::to_string(k) + " of " + std::to_string(n) + " views");
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) idx[static_cast<std::size_t>(j)] = static_cast<int>((static_cast<long>(j) * n) / k);
  return idx;
}

std::vector<ImageCountRow> run_imagecount(const MultiViewDataset& dataset, std::span<const int> counts,
                                          const FitConfig& fit_cfg, const DehazeOptions& options, int threads) {
  dataset.validate();
  require(!counts.empty(), ErrorCode::kInvalidArgument, "no view counts requested");
  const int n = static_cast<int>(dataset.views.size());
  for (int c : counts) {
    require(c >= 2 && c <= n, ErrorCode::kInvalidArgument,
            "view count " + std::to_string(c) + " not available in a " + std::to_string(n) + "-view dataset");
  }
  const RenderConfig rc = render_config_for(dataset.meta, threads);
  const std::vector<ImageBuffer> truth = ground_truth_images(dataset, rc);
  std::vector<CameraModel> all_cams;
  for (const View& v : dataset.views) all_cams.push_back(v.camera);

  std::vector<ImageCountRow> rows;
  for (int c : counts) {
    const MultiViewDataset subset = dataset.select(spread_indices(n, c));
    const auto t0 = std::chrono::steady_clock::now();
    const FitResult fit = fit_grid(subset, fit_cfg, rc);
    const auto t1 = std::chrono::steady_clock::now();
    const DehazeResult dh = dehaze_grid(fit.grid, subset, rc, options);

    const auto hazy_renders = render_views(fit.grid, all_cams, rc);
    const auto dehazed_renders = render_views(dh.dehazed, all_cams, rc);
    ImageCountRow row;
    row.views = c;
    row.haze_psnr = pooled_psnr(hazy_renders, truth);
    row.haze_ssim = mean_ssim(hazy_renders, truth);
    if (dh.report.compensated) {
      // Compensation needs the captured image, so only scored views that have one.
      std::vector<ImageBuffer> out, ref;
      const auto picked = spread_indices(n, c);
      for (std::size_t j = 0; j < picked.size(); ++j) {
        out.push_back(dh.images[j]);
        ref.push_back(truth[static_cast<std::size_t>(picked[j])]);
      }
      row.dehaze_psnr = pooled_psnr(out, ref);
      row.dehaze_ssim = mean_ssim(out, ref);
    } else {
      row.dehaze_psnr = pooled_psnr(dehazed_renders, truth);
      row.dehaze_ssim = mean_ssim(dehazed_renders, truth);
    }
    row.threshold = dh.report.selected_threshold;
    row.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
    rows.push_back(row);
  }
  return rows;
}

std::vector<ThresholdLevel> run_threshold_experiment(const SynthConfig& base, std::span<const double> levels,
                                                     const FitConfig& fit_cfg, const DehazeOptions& options) {
  require(!levels.empty(), ErrorCode::kInvalidArgument, "no haze levels requested");
  std::vector<ThresholdLevel> out;
  for (double level : levels) {
    SynthConfig cfg = base;
    cfg.haze_opacity = level;
    const SynthOutput synth = synthesize(cfg);
    const RenderConfig rc = cfg.render_config();
    std::vector<ImageBuffer> clean;
    for (const View& v : synth.clean.views) clean.push_back(v.image);

    const FitResult fit = fit_grid(synth.hazy, fit_cfg, rc);
    DehazeResult dh = dehaze_grid(fit.grid, synth.hazy, rc, options, clean);

    ThresholdLevel row;
    row.haze_opacity = level;
    std::vector<ImageBuffer> hazy;
    for (const View& v : synth.hazy.views) hazy.push_back(v.image);
    row.hazy_psnr = pooled_psnr(hazy, clean);
    const auto& sweep = dh.report.sweep;
    const auto best = std::max_element(sweep.gt_psnr.begin(), sweep.gt_psnr.end());
    row.best_gt_psnr = *best;
    row.best_gt_threshold = sweep.thresholds[static_cast<std::size_t>(best - sweep.gt_psnr.begin())];
    const auto pick = std::find(sweep.thresholds.begin(), sweep.thresholds.end(), dh.report.selected_threshold);
    row.selected_gt_psnr = sweep.gt_psnr[static_cast<std::size_t>(pick - sweep.thresholds.begin())];
    row.report = std::move(dh.report);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace vxhaze
