#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vxhaze/camera.hpp"
#include "vxhaze/grid.hpp"
#include "vxhaze/image.hpp"

namespace vxhaze {

struct View {
  CameraModel camera;
  ImageBuffer image;
};

struct DatasetMeta {
  std::string scene_id = "scene";
  std::string haze_kind = "none";
  std::uint64_t seed = 0;
  // Scene box the rays are clipped to.
  Aabb bbox;
  Rgb background = Rgb::Zero();
  double reference_step = 0.25;
  int samples_per_ray = 128;
};

struct MultiViewDataset {
  std::vector<View> views;
  std::optional<VoxelGrid> ground_truth;
  DatasetMeta meta;

  // Throws kInvalidArgument when empty or image dims disagree.
  void validate() const;
  int width() const { return views.front().image.width(); }
  int height() const { return views.front().image.height(); }

  // Subset in the given view order; keeps metadata and ground truth.
  MultiViewDataset select(const std::vector<int>& indices) const;
};

}  // namespace vxhaze
