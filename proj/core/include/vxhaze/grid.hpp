#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vxhaze/types.hpp"

namespace vxhaze {

struct GridDims {
  int nx = 2;
  int ny = 2;
  int nz = 2;

  std::size_t count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  }
  bool operator==(const GridDims&) const = default;
};

// The eight nodes surrounding a point and their trilinear weights.
struct Stencil {
  std::array<std::uint32_t, 8> index;
  std::array<double, 8> weight;
};

struct GridSample {
  double density = 0.0;
  Rgb color = Rgb::Zero();
};

/// Dense node-centred voxel field over an axis-aligned box.
///
/// Node (i, j, k) sits at bbox.min + (i, j, k) * spacing with
/// spacing = extent / (dims - 1), so the corner nodes lie on the box faces and
/// trilinear interpolation reproduces stored values exactly at nodes. Storage
/// is x-fastest. Densities are raw extinction sigma (1/length); colours are
/// view-independent RGB in [0, 1].
class VoxelGrid {
 public:
  VoxelGrid(GridDims dims, Aabb bbox);

  const GridDims& dims() const { return dims_; }
  const Aabb& bbox() const { return bbox_; }
  std::size_t voxel_count() const { return dims_.count(); }
  Vec3 spacing() const { return spacing_; }

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims_.nx) *
               (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims_.ny) * static_cast<std::size_t>(z));
  }
  Vec3 node_position(int x, int y, int z) const;
  Vec3 node_position(std::size_t linear) const;

  float density(std::size_t i) const { return density_[i]; }
  Rgb color(std::size_t i) const {
    return {color_[3 * i], color_[3 * i + 1], color_[3 * i + 2]};
  }
  void set_density(std::size_t i, float sigma) { density_[i] = sigma; }
  void set_color(std::size_t i, const Rgb& c) {
    color_[3 * i] = static_cast<float>(c.x());
    color_[3 * i + 1] = static_cast<float>(c.y());
    color_[3 * i + 2] = static_cast<float>(c.z());
  }

  std::span<const float> densities() const { return density_; }
  std::span<float> densities() { return density_; }
  // Interleaved RGB, 3 floats per voxel.
  std::span<const float> colors() const { return color_; }
  std::span<float> colors() { return color_; }

  // Trilinear stencil for p, or nullopt outside the box. p must be finite.
  std::optional<Stencil> stencil(const Vec3& p) const;

  // Throws ErrorCode::kCorruptGrid if any sigma is negative or non-finite or
  // any colour channel leaves [0, 1].
  void validate() const;

  bool operator==(const VoxelGrid& o) const {
    return dims_ == o.dims_ && bbox_ == o.bbox_ && density_ == o.density_ && color_ == o.color_;
  }

 private:
  GridDims dims_;
  Aabb bbox_;
  Vec3 spacing_;
  Vec3 inv_spacing_;
  std::vector<float> density_;
  std::vector<float> color_;
};

/// Trilinear sample of density and colour; vacuum outside the box.
/// Throws kInvalidSamplePoint for non-finite input.
GridSample grid_sample(const VoxelGrid& grid, const Vec3& point);

// Opacity of one voxel over a reference step: 1 - exp(-sigma * step).
inline double opacity(double sigma, double step) { return -std::expm1(-sigma * step); }
double density_for_opacity(double alpha, double step);

// Resample onto new dims over the same box (used for coarse-to-fine fitting).
VoxelGrid resample(const VoxelGrid& grid, GridDims dims);

}  // namespace vxhaze
