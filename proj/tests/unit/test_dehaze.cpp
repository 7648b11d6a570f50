#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "vxhaze/dehaze.hpp"
#include "vxhaze/synthesis.hpp"

using namespace vxhaze;

namespace {

constexpr double kStep = 0.25;

// Textured cube of near-infinite density inside an otherwise empty box.
VoxelGrid cube_grid(int n) {
  VoxelGrid g({n, n, n}, {});
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    const Vec3 p = g.node_position(i);
    g.set_color(i, {0.5 + 0.4 * std::sin(3 * p.x()), 0.5 + 0.4 * std::cos(2 * p.y()), 0.3 + 0.2 * p.z()});
    if (p.cwiseAbs().maxCoeff() <= 0.45) g.set_density(i, 1000.0f);
  }
  return g;
}

std::vector<CameraModel> cameras(int count, int size = 24) {
  std::vector<CameraModel> cams;
  for (int i = 0; i < count; ++i) {
    const double a = 2.0 * M_PI * i / count + 0.3;
    cams.push_back(CameraModel::look_at(Intrinsics::from_fov(size, size, 50.0),
                                        {3.0 * std::cos(a), 0.8, 3.0 * std::sin(a)}, {0, 0, 0}));
  }
  return cams;
}

RenderConfig render_cfg() {
  RenderConfig rc;
  rc.samples_per_ray = 96;
  rc.background = {0.3, 0.35, 0.45};
  return rc;
}

ThresholdSweep sweep_from_ssim(const std::vector<double>& ssim) {
  ThresholdSweep s;
  for (std::size_t k = 0; k <= ssim.size(); ++k) s.thresholds.push_back(0.01 * (k + 1));
  s.interval_ssim = ssim;
  for (double v : ssim) s.interval_psnr.push_back(10.0 + 30.0 * v);
  return s;
}

}  // namespace

TEST_CASE("remove_voxels at threshold 0 keeps the grid") {
  VoxelGrid g = testing::random_grid({6, 6, 6}, 1);
  g.set_density(5, 0.0f);
  CHECK(remove_voxels(g, 0.0, kStep) == g);
}

TEST_CASE("remove_voxels at threshold 1 empties the grid") {
  const VoxelGrid g = testing::random_grid({6, 6, 6}, 2, 500.0);
  const VoxelGrid r = remove_voxels(g, 1.0, kStep);
  for (float d : r.densities()) CHECK(d == 0.0f);
  CHECK(std::equal(r.colors().begin(), r.colors().end(), g.colors().begin()));
  CHECK_ERROR_CODE(remove_voxels(g, 1.5, kStep), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE(remove_voxels(g, -0.1, kStep), ErrorCode::kInvalidArgument);
}

TEST_CASE("removing haze voxels restores clean renders") {
  const VoxelGrid clean = cube_grid(24);
  HazeParams p = haze_params_for_opacity(0.1, kStep);
  p.emission = {0.75, 0.78, 0.82};
  const VoxelGrid hazy = inject_haze(clean, make_haze_field(HazeProfileKind::kUniform, p, 0), Rgb::Constant(0.85));
  const VoxelGrid removed = remove_voxels(hazy, 0.5, kStep);
  const RenderConfig rc = render_cfg();
  for (const CameraModel& cam : cameras(3)) {
    const ImageBuffer a = render_image(clean, cam, rc);
    const ImageBuffer b = render_image(removed, cam, rc);
    const ImageBuffer h = render_image(hazy, cam, rc);
    double worst = 0.0, hazy_worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
      worst = std::max(worst, static_cast<double>(std::abs(a.data()[i] - b.data()[i])));
      hazy_worst = std::max(hazy_worst, static_cast<double>(std::abs(a.data()[i] - h.data()[i])));
    }
    CHECK(worst < 1e-3);
    CHECK(hazy_worst > 0.05);
  }
}

TEST_CASE("sweep thresholds are geometric and increasing") {
  const auto t = SweepSpec{0.005, 0.8, 32}.thresholds();
  REQUIRE(t.size() == 32);
  CHECK(t.front() == doctest::Approx(0.005));
  CHECK(t.back() == doctest::Approx(0.8));
  for (std::size_t k = 2; k < t.size(); ++k) CHECK(t[k] / t[k - 1] == doctest::Approx(t[1] / t[0]));
  CHECK_ERROR_CODE((SweepSpec{0.1, 0.05, 10}.thresholds()), ErrorCode::kInvalidArgument);
  CHECK_ERROR_CODE((SweepSpec{0.01, 0.5, 3}.thresholds()), ErrorCode::kSweepTooCoarse);
}

TEST_CASE("sweep of a vacuum grid is flat") {
  const VoxelGrid g({6, 6, 6}, {});
  const auto cams = cameras(2, 16);
  const auto th = SweepSpec{0.01, 0.5, 6}.thresholds();
  const ThresholdSweep s = threshold_sweep(g, cams, th, render_cfg());
  REQUIRE(s.intervals() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(s.interval_ssim[k] == 1.0);
    CHECK(s.interval_psnr[k] == kPsnrInfinity);
  }
  const ThresholdSelection sel = select_threshold(s);
  CHECK(sel.threshold_index == 0);
  CHECK_FALSE(sel.three_phase);
}

TEST_CASE("sweep of pure haze changes in exactly one interval") {
  const HazeField h = make_haze_field(HazeProfileKind::kUniform, haze_params_for_opacity(0.1, kStep), 0);
  const VoxelGrid g = inject_haze(VoxelGrid({12, 12, 12}, {}), h, Rgb::Constant(0.85));
  const auto th = SweepSpec{0.01, 0.8, 12}.thresholds();
  const ThresholdSweep s = threshold_sweep(g, cameras(2, 16), th, render_cfg());
  int low = 0;
  for (std::size_t k = 0; k < s.intervals(); ++k) {
    if (s.interval_ssim[k] < 0.99) {
      ++low;
      CHECK(th[k] < 0.1);
      CHECK(th[k + 1] >= 0.1);
    } else {
      CHECK(s.interval_ssim[k] == doctest::Approx(1.0));
    }
  }
  CHECK(low == 1);
}

TEST_CASE("sweep reports ground-truth curves when given references") {
  const VoxelGrid clean = cube_grid(16);
  const HazeField h = make_haze_field(HazeProfileKind::kUniform, haze_params_for_opacity(0.05, kStep), 0);
  const VoxelGrid hazy = inject_haze(clean, h, Rgb::Constant(0.85));
  const auto cams = cameras(2, 16);
  const auto ref = render_views(clean, cams, render_cfg());
  const auto th = SweepSpec{0.01, 0.8, 8}.thresholds();
  const ThresholdSweep s = threshold_sweep(hazy, cams, th, render_cfg(), ref);
  REQUIRE(s.gt_psnr.size() == th.size());
  CHECK(s.gt_psnr[4] > s.gt_psnr[0] + 5.0);
}

TEST_CASE("select_threshold picks the plateau between two changes") {
  const ThresholdSweep s = sweep_from_ssim({0.7, 0.99, 0.99, 0.6});
  const ThresholdSelection sel = select_threshold(s);
  CHECK(sel.selected_interval >= 1);
  CHECK(sel.selected_interval <= 2);
  CHECK(sel.threshold >= s.thresholds[1]);
  CHECK(sel.threshold <= s.thresholds[3]);
  CHECK(sel.three_phase);
  CHECK(sel.plateau_begin == 1);
  CHECK(sel.plateau_end == 2);
}

TEST_CASE("select_threshold prefers the lowest threshold on ties") {
  const ThresholdSelection sel = select_threshold(sweep_from_ssim({0.95, 0.95, 0.95, 0.95, 0.95}));
  CHECK(sel.threshold_index == 0);
  CHECK(sel.threshold == doctest::Approx(0.01));
  CHECK_FALSE(sel.three_phase);
}

TEST_CASE("select_threshold stops before the first change without a valley") {
  // Flat, then objects start to vanish.
  const ThresholdSelection sel = select_threshold(sweep_from_ssim({1.0, 1.0, 0.998, 0.8, 0.5}));
  CHECK(sel.selected_interval <= 2);
  CHECK_FALSE(sel.three_phase);
}

TEST_CASE("select_threshold needs three intervals") {
  CHECK_ERROR_CODE(select_threshold(sweep_from_ssim({0.9, 0.8})), ErrorCode::kSweepTooCoarse);
}

TEST_CASE("global_compensate") {
  const ImageBuffer hazy(2, 2, Rgb::Constant(0.6));
  CHECK(global_compensate(hazy, hazy) == hazy);
  CHECK(global_compensate(hazy, ImageBuffer(2, 2, Rgb::Constant(0.8))).at(0, 0).x() == doctest::Approx(1.0));
  const ImageBuffer h2(2, 2, Rgb::Constant(0.1));
  CHECK(global_compensate(h2, ImageBuffer(2, 2, Rgb::Constant(0.9))).at(1, 0).z() == doctest::Approx(1.0));
  CHECK(global_compensate(h2, ImageBuffer(2, 2, Rgb::Constant(0.3))).at(1, 0).z() == doctest::Approx(0.5));
  CHECK_ERROR_CODE(global_compensate(h2, ImageBuffer(3, 2)), ErrorCode::kDimsMismatch);
}

TEST_CASE("compensation only runs for global haze") {
  const VoxelGrid clean = cube_grid(16);
  HazeParams p = haze_params_for_opacity(0.1, kStep);
  const VoxelGrid hazy = inject_haze(clean, make_haze_field(HazeProfileKind::kLocalBlob, p, 4), Rgb::Constant(0.85));
  const RenderConfig rc = render_cfg();
  MultiViewDataset ds;
  for (const CameraModel& c : cameras(3, 16)) ds.views.push_back({c, render_image(hazy, c, rc)});
  ds.meta.background = rc.background;
  ds.meta.samples_per_ray = rc.samples_per_ray;

  DehazeOptions o;
  o.sweep = {0.01, 0.8, 10};
  o.sweep_views = 0;
  o.haze_class = HazeClass::kNonGlobal;
  const DehazeResult off = dehaze_grid(hazy, ds, rc, o);
  CHECK_FALSE(off.report.compensated);
  const auto renders = render_views(off.dehazed, std::vector<CameraModel>{ds.views[0].camera}, rc);
  CHECK(off.images[0] == renders[0]);

  o.haze_class = HazeClass::kGlobal;
  const DehazeResult on = dehaze_grid(hazy, ds, rc, o);
  CHECK(on.report.compensated);
  CHECK(on.dehazed == off.dehazed);
  CHECK(on.images[0] == global_compensate(ds.views[0].image, renders[0]));
}

TEST_CASE("haze class names") {
  CHECK(parse_haze_class("global") == HazeClass::kGlobal);
  CHECK(parse_haze_class("nonglobal") == HazeClass::kNonGlobal);
  CHECK(std::string(to_string(HazeClass::kGlobal)) == "global");
  CHECK_ERROR_CODE(parse_haze_class("partial"), ErrorCode::kInvalidArgument);
}
