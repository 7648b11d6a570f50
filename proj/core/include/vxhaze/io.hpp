#pragma once

#include <filesystem>

#include "vxhaze/dataset.hpp"
#include "vxhaze/grid.hpp"
#include "vxhaze/image.hpp"

namespace vxhaze {

// Grid file: "VXGRID01", u32 nx ny nz, f32 bbox min xyz max xyz, then
// nx*ny*nz records of f32 (sigma, r, g, b), x-fastest. All little-endian.
void write_grid(const std::filesystem::path& path, const VoxelGrid& grid);
VoxelGrid read_grid(const std::filesystem::path& path);

// Portable float map, colour ("PF"), little-endian, bottom-to-top rows.
void write_pfm(const std::filesystem::path& path, const ImageBuffer& image);
ImageBuffer read_pfm(const std::filesystem::path& path);

// 8-bit sRGB-encoded preview of a linear image.
void write_png(const std::filesystem::path& path, const ImageBuffer& image);

// dataset.json + view_NNN.pfm/.png inside dir. The optional ground-truth grid
// is stored alongside as ground_truth.vx.
void write_dataset(const std::filesystem::path& dir, const MultiViewDataset& dataset);
MultiViewDataset read_dataset(const std::filesystem::path& dir);

double linear_to_srgb(double v);
double srgb_to_linear(double v);

}  // namespace vxhaze
