#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "vxhaze/error.hpp"
#include "vxhaze/grid.hpp"

namespace testing {

// Runs expr and checks it throws vxhaze::Error with the given code.
#define CHECK_ERROR_CODE(expr, expected)                 \
  do {                                                   \
    bool thrown_ = false;                                \
    try {                                                \
      (void)(expr);                                      \
    } catch (const vxhaze::Error& e_) {                  \
      thrown_ = true;                                    \
      CHECK(e_.code() == (expected));                    \
    }                                                    \
    CHECK_MESSAGE(thrown_, "expected vxhaze::Error");    \
  } while (0)

inline vxhaze::VoxelGrid filled(int n, double sigma, const vxhaze::Rgb& c, vxhaze::Aabb box = {}) {
  vxhaze::VoxelGrid g({n, n, n}, box);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    g.set_density(i, static_cast<float>(sigma));
    g.set_color(i, c);
  }
  return g;
}

inline vxhaze::VoxelGrid random_grid(vxhaze::GridDims dims, std::uint64_t seed, double max_sigma = 4.0) {
  vxhaze::VoxelGrid g(dims, {});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < g.voxel_count(); ++i) {
    g.set_density(i, static_cast<float>(max_sigma * u(rng)));
    g.set_color(i, {u(rng), u(rng), u(rng)});
  }
  return g;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("vxhaze_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
