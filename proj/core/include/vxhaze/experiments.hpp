#pragma once

#include <span>
#include <string>
#include <vector>

#include "vxhaze/dataset.hpp"
#include "vxhaze/dehaze.hpp"
#include "vxhaze/reconstruction.hpp"
#include "vxhaze/render.hpp"
#include "vxhaze/synthesis.hpp"

namespace vxhaze {

struct SynthConfig {
  SceneSpec scene;
  HazeProfileKind haze_kind = HazeProfileKind::kUniform;
  // Peak per-voxel haze opacity at the reference step; 0 means no haze.
  double haze_opacity = 0.0;
  double haze_albedo = 0.9;
  Rgb haze_emission = {0.75, 0.78, 0.82};
  double multiscatter_retention = 0.3;
  Rgb ambient = Rgb::Constant(0.85);
  Rgb background = {0.3, 0.35, 0.45};
  double reference_step = 0.25;
  int samples_per_ray = 128;
  int threads = 1;

  RenderConfig render_config() const;
  HazeField haze_field() const;
  // "none" or "<kind>:<opacity>" as accepted by set_haze.
  std::string haze_label() const;
  // Parses "none", "uniform:0.1", "height:0.05", "blob:0.2".
  void set_haze(const std::string& spec);
};

struct SynthOutput {
  VoxelGrid clean_grid;
  VoxelGrid hazy_grid;
  HazeField haze;
  // Both carry the clean grid as ground truth and share cameras.
  MultiViewDataset clean;
  MultiViewDataset hazy;
};

SynthOutput synthesize(const SynthConfig& cfg);

// Render settings a dataset was produced with (background, reference step,
// samples per ray), with the given thread count.
RenderConfig render_config_for(const DatasetMeta& meta, int threads = 1);

// Clean images of every view, rendered from the dataset's ground-truth grid.
// Raises kMissingFile when the dataset has none.
std::vector<ImageBuffer> ground_truth_images(const MultiViewDataset& dataset, const RenderConfig& cfg);

// k indices spread evenly over [0, n).
std::vector<int> spread_indices(int n, int k);

struct ImageCountRow {
  int views = 0;
  // Fitted (still hazy) renders and dehazed output, both against ground truth
  // over every dataset view.
  double haze_psnr = 0.0;
  double haze_ssim = 0.0;
  double dehaze_psnr = 0.0;
  double dehaze_ssim = 0.0;
  double threshold = 0.0;
  double fit_seconds = 0.0;
};

/// Fits and dehazes on evenly spread subsets of each requested size and
/// scores against ground truth on all views of the dataset. Counts must lie
/// in [2, views]; the dataset needs a ground-truth grid.
std::vector<ImageCountRow> run_imagecount(const MultiViewDataset& dataset, std::span<const int> counts,
                                          const FitConfig& fit_cfg, const DehazeOptions& options, int threads = 1);

struct ThresholdLevel {
  double haze_opacity = 0.0;
  // Hazy input against ground truth, pooled over views.
  double hazy_psnr = 0.0;
  double selected_gt_psnr = 0.0;
  double best_gt_psnr = 0.0;
  double best_gt_threshold = 0.0;
  DehazeReport report;
};

/// One synthesize, fit and dehaze per haze opacity, with ground-truth curves
/// attached to each sweep.
std::vector<ThresholdLevel> run_threshold_experiment(const SynthConfig& base, std::span<const double> levels,
                                                     const FitConfig& fit_cfg, const DehazeOptions& options);

}  // namespace vxhaze
