#include "vxhaze/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vxhaze/error.hpp"

namespace vxhaze {

VoxelGrid::VoxelGrid(GridDims dims, Aabb bbox) : dims_(dims), bbox_(std::move(bbox)) {
  require(dims_.nx >= 2 && dims_.ny >= 2 && dims_.nz >= 2, ErrorCode::kInvalidArgument,
          "grid dims must be >= 2 per axis");
  require(bbox_.min.allFinite() && bbox_.max.allFinite() && (bbox_.max.array() > bbox_.min.array()).all(),
          ErrorCode::kInvalidArgument, "grid bbox must be finite with min < max");
  require(dims_.count() < (std::size_t{1} << 32), ErrorCode::kInvalidArgument, "grid too large");
  const Vec3 cells(dims_.nx - 1, dims_.ny - 1, dims_.nz - 1);
  spacing_ = bbox_.extent().cwiseQuotient(cells);
  inv_spacing_ = spacing_.cwiseInverse();
  density_.assign(dims_.count(), 0.0f);
  color_.assign(3 * dims_.count(), 0.0f);
}

Vec3 VoxelGrid::node_position(int x, int y, int z) const {
  return bbox_.min + Vec3(x, y, z).cwiseProduct(spacing_);
}

Vec3 VoxelGrid::node_position(std::size_t linear) const {
  const auto nx = static_cast<std::size_t>(dims_.nx);
  const auto ny = static_cast<std::size_t>(dims_.ny);
  const int x = static_cast<int>(linear % nx);
  const int y = static_cast<int>((linear / nx) % ny);
  const int z = static_cast<int>(linear / (nx * ny));
  return node_position(x, y, z);
}

std::optional<Stencil> VoxelGrid::stencil(const Vec3& p) const {
  if (!bbox_.contains(p)) return std::nullopt;
  const Vec3 local = (p - bbox_.min).cwiseProduct(inv_spacing_);
  const int n[3] = {dims_.nx, dims_.ny, dims_.nz};
  int i0[3];
  double f[3];
  for (int a = 0; a < 3; ++a) {
    const int cell = std::clamp(static_cast<int>(std::floor(local[a])), 0, n[a] - 2);
    i0[a] = cell;
    f[a] = std::clamp(local[a] - cell, 0.0, 1.0);
  }
  Stencil s;
  const std::size_t base = index(i0[0], i0[1], i0[2]);
  const std::size_t sx = 1;
  const std::size_t sy = static_cast<std::size_t>(dims_.nx);
  const std::size_t sz = sy * static_cast<std::size_t>(dims_.ny);
  for (int c = 0; c < 8; ++c) {
    const int bx = c & 1;
    const int by = (c >> 1) & 1;
    const int bz = (c >> 2) & 1;
    s.index[c] = static_cast<std::uint32_t>(base + bx * sx + by * sy + bz * sz);
    s.weight[c] = (bx ? f[0] : 1.0 - f[0]) * (by ? f[1] : 1.0 - f[1]) * (bz ? f[2] : 1.0 - f[2]);
  }
  return s;
}

void VoxelGrid::validate() const {
  for (std::size_t i = 0; i < density_.size(); ++i) {
    const float s = density_[i];
    if (!std::isfinite(s) || s < 0.0f) {
      fail(ErrorCode::kCorruptGrid, "corrupt grid: density at voxel " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < color_.size(); ++i) {
    const float c = color_[i];
    if (!(c >= 0.0f && c <= 1.0f)) {
      fail(ErrorCode::kCorruptGrid, "corrupt grid: colour at voxel " + std::to_string(i / 3));
    }
  }
}

GridSample grid_sample(const VoxelGrid& grid, const Vec3& point) {
  require(point.allFinite(), ErrorCode::kInvalidSamplePoint, "invalid sample point");
  GridSample out;
  const auto st = grid.stencil(point);
  if (!st) return out;
  const auto dens = grid.densities();
  const auto col = grid.colors();
  for (int c = 0; c < 8; ++c) {
    const std::size_t i = st->index[c];
    const double w = st->weight[c];
    out.density += w * dens[i];
    out.color += w * Rgb(col[3 * i], col[3 * i + 1], col[3 * i + 2]);
  }
  return out;
}

double density_for_opacity(double alpha, double step) {
  require(alpha >= 0.0 && alpha < 1.0 && step > 0.0, ErrorCode::kInvalidArgument,
          "opacity must be in [0, 1) and step > 0");
  return -std::log1p(-alpha) / step;
}

VoxelGrid resample(const VoxelGrid& grid, GridDims dims) {
  VoxelGrid out(dims, grid.bbox());
  for (int z = 0; z < dims.nz; ++z) {
    for (int y = 0; y < dims.ny; ++y) {
      for (int x = 0; x < dims.nx; ++x) {
        const std::size_t i = out.index(x, y, z);
        // Clamp so nodes on the max faces stay inside despite rounding.
        const Vec3 p = out.node_position(x, y, z).cwiseMax(grid.bbox().min).cwiseMin(grid.bbox().max);
        const GridSample s = grid_sample(grid, p);
        out.set_density(i, static_cast<float>(s.density));
        out.set_color(i, s.color.cwiseMax(0.0).cwiseMin(1.0));
      }
    }
  }
  return out;
}

}  // namespace vxhaze
