#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vxhaze/dataset.hpp"
#include "vxhaze/grid.hpp"
#include "vxhaze/metrics.hpp"
#include "vxhaze/reconstruction.hpp"
#include "vxhaze/render.hpp"

namespace vxhaze {

// Zeroes sigma of every voxel whose opacity at reference_step is <= threshold.
// Colours are kept.
VoxelGrid remove_voxels(const VoxelGrid& grid, double threshold, double reference_step);

struct SweepSpec {
  double lo = 0.005;
  double hi = 0.8;
  int count = 32;

  // Geometrically spaced, strictly increasing.
  std::vector<double> thresholds() const;
};

struct ThresholdSweep {
  std::vector<double> thresholds;
  // Interval k compares renders at thresholds[k] and thresholds[k + 1].
  std::vector<double> interval_psnr;
  std::vector<double> interval_ssim;
  // Per threshold, against clean reference renders when provided.
  std::vector<double> gt_psnr;
  std::vector<double> gt_ssim;

  std::size_t intervals() const { return interval_ssim.size(); }
};

// Renders every camera at every threshold and scores consecutive pairs by
// mean PSNR/SSIM. reference, if non-empty, holds one clean image per camera.
ThresholdSweep threshold_sweep(const VoxelGrid& grid, std::span<const CameraModel> cameras,
                               std::span<const double> thresholds, const RenderConfig& cfg,
                               std::span<const ImageBuffer> reference = {});

struct ThresholdSelection {
  double threshold = 0.0;
  std::size_t threshold_index = 0;
  std::size_t selected_interval = 0;
  // Inclusive interval-index range of the plateau holding the selection.
  std::size_t plateau_begin = 0;
  std::size_t plateau_end = 0;
  // Change, plateau, change was found.
  bool three_phase = false;
};

/// Picks the threshold where removal changes renders least.
///
/// Change per interval is 1 - SSIM. An interval is a plateau candidate when
/// some earlier and some later interval both changed more than it by over
/// eps (change, plateau, change). Without such a valley, the candidates are
/// the intervals ahead of the first one that falls more than eps below the
/// best SSIM, or, if the sweep opens with that change, the flat ones after
/// it. Among candidates the maximum SSIM wins, ties go to higher PSNR, then
/// to the lower threshold. The returned threshold is the lower end of the
/// winning interval, and the plateau is the contiguous run around it within
/// eps of its SSIM.
ThresholdSelection select_threshold(const ThresholdSweep& sweep, double eps = 0.005);

// clamp(2 * dehazed - hazy, 0, 1) per channel.
ImageBuffer global_compensate(const ImageBuffer& hazy, const ImageBuffer& dehazed);

enum class HazeClass { kGlobal, kNonGlobal };
const char* to_string(HazeClass c);
HazeClass parse_haze_class(const std::string& name);

struct ViewMetrics {
  int view = 0;
  MetricTriple before;  // fitted render vs input
  MetricTriple after;   // dehazed output vs input
  std::optional<MetricTriple> before_gt;
  std::optional<MetricTriple> after_gt;
};

struct DehazeReport {
  double selected_threshold = 0.0;
  std::size_t plateau_begin = 0;
  std::size_t plateau_end = 0;
  bool three_phase = false;
  double removed_fraction = 0.0;
  // Among voxels with opacity > 0.5 before removal.
  double removed_opaque_fraction = 0.0;
  HazeClass haze_class = HazeClass::kNonGlobal;
  bool compensated = false;
  ThresholdSweep sweep;
  std::vector<ViewMetrics> views;
};

struct DehazeOptions {
  SweepSpec sweep;
  HazeClass haze_class = HazeClass::kNonGlobal;
  double plateau_eps = 0.005;
  // Cameras used for the sweep (evenly spread); 0 = all.
  int sweep_views = 8;
};

struct DehazeResult {
  VoxelGrid fitted;
  VoxelGrid dehazed;
  DehazeReport report;
  // One per dataset view.
  std::vector<ImageBuffer> images;
  std::vector<ImageBuffer> fitted_renders;
};

// Sweep, select, remove and re-render an already fitted grid. reference, if
// non-empty, holds clean images for every dataset view.
DehazeResult dehaze_grid(const VoxelGrid& fitted, const MultiViewDataset& dataset, const RenderConfig& render_cfg,
                         const DehazeOptions& options, std::span<const ImageBuffer> reference = {});

// fit_grid followed by dehaze_grid.
DehazeResult dehaze_pipeline(const MultiViewDataset& dataset, const FitConfig& fit_cfg,
                             const RenderConfig& render_cfg, const DehazeOptions& options,
                             std::span<const ImageBuffer> reference = {});

}  // namespace vxhaze
