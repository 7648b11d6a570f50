#include "vxhaze/dehaze.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vxhaze/error.hpp"

namespace vxhaze {

VoxelGrid remove_voxels(const VoxelGrid& grid, double threshold, double reference_step) {
  require(threshold >= 0.0 && threshold <= 1.0, ErrorCode::kInvalidArgument, "threshold must be in [0, 1]");
  require(reference_step > 0.0, ErrorCode::kInvalidArgument, "reference_step must be > 0");
  VoxelGrid out = grid;
  for (float& s : out.densities()) {
    if (opacity(s, reference_step) <= threshold) s = 0.0f;
  }
  return out;
}

std::vector<double> SweepSpec::thresholds() const {
  require(lo > 0.0 && hi <= 1.0 && lo < hi, ErrorCode::kInvalidArgument, "sweep needs 0 < lo < hi <= 1");
  require(count >= 4, ErrorCode::kSweepTooCoarse, "sweep too coarse: need >= 4 thresholds");
  std::vector<double> t(static_cast<std::size_t>(count));
  const double ratio = std::log(hi / lo);
  for (int k = 0; k < count; ++k) t[static_cast<std::size_t>(k)] = lo * std::exp(ratio * k / (count - 1));
  t.back() = hi;
  return t;
}

ThresholdSweep threshold_sweep(const VoxelGrid& grid, std::span<const CameraModel> cameras,
                               std::span<const double> thresholds, const RenderConfig& cfg,
                               std::span<const ImageBuffer> reference) {
  require(thresholds.size() >= 3, ErrorCode::kSweepTooCoarse, "sweep too coarse: need >= 3 thresholds");
  require(!cameras.empty(), ErrorCode::kInvalidArgument, "sweep needs at least one camera");
  require(reference.empty() || reference.size() == cameras.size(), ErrorCode::kInvalidArgument,
          "reference must hold one image per camera");
  for (std::size_t k = 1; k < thresholds.size(); ++k) {
    require(thresholds[k] > thresholds[k - 1], ErrorCode::kInvalidArgument, "thresholds must be strictly increasing");
  }
  ThresholdSweep sweep;
  sweep.thresholds.assign(thresholds.begin(), thresholds.end());
  std::vector<ImageBuffer> previous;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const VoxelGrid pruned = remove_voxels(grid, thresholds[k], cfg.reference_step);
    std::vector<ImageBuffer> current = render_views(pruned, cameras, cfg);
    if (!reference.empty()) {
      sweep.gt_psnr.push_back(pooled_psnr(current, reference));
      sweep.gt_ssim.push_back(mean_ssim(current, reference));
    }
    if (k > 0) {
      sweep.interval_psnr.push_back(pooled_psnr(previous, current));
      sweep.interval_ssim.push_back(mean_ssim(previous, current));
    }
    previous = std::move(current);
  }
  return sweep;
}

ThresholdSelection select_threshold(const ThresholdSweep& sweep, double eps) {
  const std::size_t n = sweep.intervals();
  require(n >= 3, ErrorCode::kSweepTooCoarse, "sweep too coarse: need >= 3 intervals");
  require(sweep.thresholds.size() == n + 1 && sweep.interval_psnr.size() == n, ErrorCode::kInvalidArgument,
          "sweep needs one fewer interval metric than thresholds");
  require(eps >= 0.0, ErrorCode::kInvalidArgument, "plateau tolerance must be >= 0");

  // Interval k sits in a plateau when removal changed renders by more than
  // eps beyond it both somewhere earlier and somewhere later in the sweep.
  std::vector<double> change(n);
  for (std::size_t k = 0; k < n; ++k) change[k] = 1.0 - sweep.interval_ssim[k];
  std::vector<double> before(n, 0.0), after(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) before[k] = std::max(before[k - 1], change[k - 1]);
  for (std::size_t k = n - 1; k-- > 0;) after[k] = std::max(after[k + 1], change[k + 1]);

  std::vector<bool> candidate(n, false);
  bool three_phase = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (before[k] - change[k] > eps && after[k] - change[k] > eps) {
      candidate[k] = true;
      three_phase = true;
    }
  }
  if (!three_phase) {
    // One-sided change: keep the flat run ahead of it (nothing worth
    // removing yet), or the flats after it when it opens the sweep.
    const double top = *std::max_element(sweep.interval_ssim.begin(), sweep.interval_ssim.end());
    std::size_t first_change = n;
    for (std::size_t k = 0; k < n && first_change == n; ++k) {
      if (sweep.interval_ssim[k] < top - eps) first_change = k;
    }
    for (std::size_t k = 0; k < n; ++k) {
      const bool flat = sweep.interval_ssim[k] >= top - eps;
      candidate[k] = first_change == 0 ? flat : k < first_change;
    }
  }

  std::size_t best = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (!candidate[k]) continue;
    if (best == n) {
      best = k;
      continue;
    }
    const double s = sweep.interval_ssim[k];
    const double sb = sweep.interval_ssim[best];
    if (s > sb || (s == sb && sweep.interval_psnr[k] > sweep.interval_psnr[best])) best = k;
  }

  ThresholdSelection sel;
  sel.selected_interval = best;
  sel.threshold_index = best;
  sel.threshold = sweep.thresholds[best];
  sel.three_phase = three_phase;
  const double level = sweep.interval_ssim[best];
  std::size_t b = best, e = best;
  while (b > 0 && std::abs(sweep.interval_ssim[b - 1] - level) <= eps) --b;
  while (e + 1 < n && std::abs(sweep.interval_ssim[e + 1] - level) <= eps) ++e;
  sel.plateau_begin = b;
  sel.plateau_end = e;
  return sel;
}

ImageBuffer global_compensate(const ImageBuffer& hazy, const ImageBuffer& dehazed) {
  require(hazy.same_shape(dehazed), ErrorCode::kDimsMismatch, "image dims mismatch");
  ImageBuffer out(dehazed.width(), dehazed.height());
  const auto h = hazy.data();
  const auto d = dehazed.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = std::clamp(2.0f * d[i] - h[i], 0.0f, 1.0f);
  return out;
}

const char* to_string(HazeClass c) { return c == HazeClass::kGlobal ? "global" : "nonglobal"; }

HazeClass parse_haze_class(const std::string& name) {
  if (name == "global") return HazeClass::kGlobal;
  if (name == "nonglobal" || name == "non-global") return HazeClass::kNonGlobal;
  fail(ErrorCode::kInvalidArgument, "haze class must be global or nonglobal, got '" + name + "'");
}

DehazeResult dehaze_grid(const VoxelGrid& fitted, const MultiViewDataset& dataset, const RenderConfig& render_cfg,
                         const DehazeOptions& options, std::span<const ImageBuffer> reference) {
  dataset.validate();
  render_cfg.validate();
  require(reference.empty() || reference.size() == dataset.views.size(), ErrorCode::kInvalidArgument,
          "reference must hold one clean image per view");
  const std::vector<double> thresholds = options.sweep.thresholds();
  const int n_views = static_cast<int>(dataset.views.size());
  const int n_sweep = options.sweep_views <= 0 ? n_views : std::min(options.sweep_views, n_views);

  std::vector<CameraModel> sweep_cams;
  std::vector<ImageBuffer> sweep_ref;
  for (int j = 0; j < n_sweep; ++j) {
    const auto v = static_cast<std::size_t>((static_cast<long>(j) * n_views) / n_sweep);
    sweep_cams.push_back(dataset.views[v].camera);
    if (!reference.empty()) sweep_ref.push_back(reference[v]);
  }

  DehazeResult result{fitted, fitted, {}, {}, {}};
  DehazeReport& report = result.report;
  report.haze_class = options.haze_class;
  report.sweep = threshold_sweep(fitted, sweep_cams, thresholds, render_cfg, sweep_ref);
  const ThresholdSelection sel = select_threshold(report.sweep, options.plateau_eps);
  report.selected_threshold = sel.threshold;
  report.plateau_begin = sel.plateau_begin;
  report.plateau_end = sel.plateau_end;
  report.three_phase = sel.three_phase;

  result.dehazed = remove_voxels(fitted, sel.threshold, render_cfg.reference_step);
  std::size_t removed = 0, opaque = 0, opaque_removed = 0;
  const auto before = fitted.densities();
  const auto after = result.dehazed.densities();
  for (std::size_t i = 0; i < before.size(); ++i) {
    const bool gone = before[i] > 0.0f && after[i] == 0.0f;
    if (gone) ++removed;
    if (opacity(before[i], render_cfg.reference_step) > 0.5) {
      ++opaque;
      if (gone) ++opaque_removed;
    }
  }
  report.removed_fraction = static_cast<double>(removed) / static_cast<double>(before.size());
  report.removed_opaque_fraction = opaque == 0 ? 0.0 : static_cast<double>(opaque_removed) / static_cast<double>(opaque);

  report.compensated = options.haze_class == HazeClass::kGlobal;
  for (int v = 0; v < n_views; ++v) {
    const View& view = dataset.views[static_cast<std::size_t>(v)];
    ImageBuffer hazy_render = render_image(fitted, view.camera, render_cfg);
    ImageBuffer out = render_image(result.dehazed, view.camera, render_cfg);
    if (report.compensated) out = global_compensate(view.image, out);
    ViewMetrics m;
    m.view = v;
    m.before = compare(hazy_render, view.image);
    m.after = compare(out, view.image);
    if (!reference.empty()) {
      m.before_gt = compare(view.image, reference[static_cast<std::size_t>(v)]);
      m.after_gt = compare(out, reference[static_cast<std::size_t>(v)]);
    }
    report.views.push_back(m);
    result.fitted_renders.push_back(std::move(hazy_render));
    result.images.push_back(std::move(out));
  }
  return result;
}

DehazeResult dehaze_pipeline(const MultiViewDataset& dataset, const FitConfig& fit_cfg,
                             const RenderConfig& render_cfg, const DehazeOptions& options,
                             std::span<const ImageBuffer> reference) {
  FitResult fit = fit_grid(dataset, fit_cfg, render_cfg);
  return dehaze_grid(fit.grid, dataset, render_cfg, options, reference);
}

}  // namespace vxhaze
