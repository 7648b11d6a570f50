#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vxhaze/dataset.hpp"
#include "vxhaze/grid.hpp"
#include "vxhaze/render.hpp"

namespace vxhaze {

struct TrainingRay {
  Ray ray;
  Rgb target = Rgb::Zero();
};

// Mean over rays of the channel-averaged squared colour error.
double photometric_loss(const VoxelGrid& grid, std::span<const TrainingRay> rays, const RenderConfig& cfg);

struct GridGradients {
  double loss = 0.0;
  std::vector<double> density;  // one per voxel
  std::vector<double> color;    // three per voxel
};

/// Exact gradients of photometric_loss w.r.t. every node sigma and colour.
/// Nodes no ray touches get zero. With cfg.threads > 1 rays are split across
/// workers with private buffers summed in worker order.
GridGradients loss_gradients(const VoxelGrid& grid, std::span<const TrainingRay> rays, const RenderConfig& cfg);

// Rays for every pixel of the given views.
std::vector<TrainingRay> dataset_rays(const MultiViewDataset& dataset, std::span<const int> views,
                                      const RenderConfig& cfg);

struct FitConfig {
  int iterations = 1000;
  int batch = 4096;
  double lr_density = 0.1;
  double lr_color = 0.02;
  double lr_final_fraction = 0.1;
  // Grid side lengths, coarse to fine. The last entry is the output size.
  std::vector<int> coarse_to_fine = {22, 64};
  // Initial per-voxel opacity at the reference step.
  double init_opacity = 0.01;
  double tv_weight = 0.0;
  int holdout = 0;
  int checkpoint_every = 100;
  // Training rays scored at each checkpoint (fixed subset).
  int checkpoint_rays = 4096;
  std::uint64_t seed = 0;
  bool deterministic = true;
  int threads = 1;
  bool verbose = false;

  void validate() const;
};

struct FitCheckpoint {
  int iteration = 0;
  double loss = 0.0;
  double train_psnr = 0.0;
  double heldout_psnr = 0.0;
  double heldout_ssim = 0.0;
};

struct FitReport {
  std::vector<FitCheckpoint> checkpoints;
  double wall_seconds = 0.0;
  // Fraction of voxels with opacity above 0.01 at the reference step.
  double occupied_fraction = 0.0;
  std::vector<int> train_views;
  std::vector<int> heldout_views;
};

struct FitResult {
  VoxelGrid grid;
  FitReport report;
};

/// Fits a dense grid to the dataset by Adam on photometric loss.
/// sigma = softplus(p) per node keeps densities positive; colours are
/// projected onto [0, 1] after each step. Raises kInsufficientViews with
/// fewer than 2 training views and kDivergence on a non-finite loss.
FitResult fit_grid(const MultiViewDataset& dataset, const FitConfig& fit_cfg, const RenderConfig& render_cfg);

}  // namespace vxhaze
