#include <cmath>
#include <limits>
#include <random>

#include "helpers.hpp"
#include "vxhaze/grid.hpp"

using namespace vxhaze;
using testing::filled;

TEST_CASE("grid_sample reproduces stored values at nodes") {
  const VoxelGrid g = testing::random_grid({5, 6, 7}, 3);
  for (int z = 0; z < 7; z += 3)
    for (int y = 0; y < 6; y += 2)
      for (int x = 0; x < 5; ++x) {
        const std::size_t i = g.index(x, y, z);
        const GridSample s = grid_sample(g, g.node_position(x, y, z));
        CHECK(s.density == doctest::Approx(g.density(i)).epsilon(1e-12));
        CHECK((s.color - g.color(i)).norm() < 1e-9);
      }
}

TEST_CASE("grid_sample is linear between adjacent nodes") {
  VoxelGrid g({2, 2, 2}, {});
  for (std::size_t i = 0; i < 8; ++i) g.set_color(i, {0.2, 0.4, 0.6});
  for (int z = 0; z < 2; ++z)
    for (int y = 0; y < 2; ++y) g.set_density(g.index(1, y, z), 1.0f);
  const GridSample s = grid_sample(g, {0.0, -1.0, -1.0});
  CHECK(s.density == doctest::Approx(0.5));
  CHECK((s.color - Rgb(0.2, 0.4, 0.6)).norm() < 1e-6);
}

TEST_CASE("grid_sample outside the box is vacuum") {
  const VoxelGrid g = filled(4, 3.0, {1, 1, 1});
  const GridSample s = grid_sample(g, {1.5, 0.0, 0.0});
  CHECK(s.density == 0.0);
  CHECK(s.color == Rgb::Zero());
  CHECK(grid_sample(g, {0.0, 0.0, -1.0001}).density == 0.0);
}

TEST_CASE("grid_sample rejects non-finite points") {
  const VoxelGrid g = filled(3, 1.0, {1, 1, 1});
  CHECK_ERROR_CODE(grid_sample(g, {std::nan(""), 0.0, 0.0}), ErrorCode::kInvalidSamplePoint);
  CHECK_ERROR_CODE(grid_sample(g, {0.0, std::numeric_limits<double>::infinity(), 0.0}),
                   ErrorCode::kInvalidSamplePoint);
}

TEST_CASE("trilinear weights form a partition of unity") {
  const VoxelGrid g({9, 5, 4}, {Vec3(-2, -1, 0), Vec3(3, 1, 0.5)});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 t(u(rng), u(rng), u(rng));
    const Vec3 p = g.bbox().min + t.cwiseProduct(g.bbox().extent());
    const auto st = g.stencil(p);
    REQUIRE(st.has_value());
    double sum = 0.0;
    for (double w : st->weight) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("constant fields interpolate to the constant") {
  const VoxelGrid g = filled(6, 2.5, {0.1, 0.7, 0.3});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const GridSample s = grid_sample(g, {u(rng), u(rng), u(rng)});
    CHECK(s.density == doctest::Approx(2.5));
    CHECK(s.color.y() == doctest::Approx(0.7));
  }
}

TEST_CASE("validate flags negative density and out-of-range colour") {
  VoxelGrid g = filled(3, 1.0, {0.5, 0.5, 0.5});
  CHECK_NOTHROW(g.validate());
  g.set_density(4, -1.0f);
  CHECK_ERROR_CODE(g.validate(), ErrorCode::kCorruptGrid);
  g.set_density(4, 1.0f);
  g.set_color(2, {1.5, 0.0, 0.0});
  CHECK_ERROR_CODE(g.validate(), ErrorCode::kCorruptGrid);
}

TEST_CASE("opacity and density_for_opacity invert each other") {
  for (double a : {0.0, 0.01, 0.1, 0.5, 0.9, 0.999}) {
    CHECK(opacity(density_for_opacity(a, 0.25), 0.25) == doctest::Approx(a).epsilon(1e-12));
  }
  CHECK(opacity(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
}

TEST_CASE("resample preserves linear fields") {
  VoxelGrid g({5, 5, 5}, {});
  for (int z = 0; z < 5; ++z)
    for (int y = 0; y < 5; ++y)
      for (int x = 0; x < 5; ++x) {
        const Vec3 p = g.node_position(x, y, z);
        g.set_density(g.index(x, y, z), static_cast<float>(2.0 + p.x() + 0.5 * p.y() - p.z()));
      }
  const VoxelGrid r = resample(g, {9, 7, 8});
  for (std::size_t i = 0; i < r.voxel_count(); ++i) {
    const Vec3 p = r.node_position(i);
    CHECK(r.density(i) == doctest::Approx(2.0 + p.x() + 0.5 * p.y() - p.z()).epsilon(1e-5));
  }
}
