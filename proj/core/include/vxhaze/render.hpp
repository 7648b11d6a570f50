#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vxhaze/camera.hpp"
#include "vxhaze/grid.hpp"
#include "vxhaze/image.hpp"

namespace vxhaze {

struct HazeField;

struct RenderConfig {
  int samples_per_ray = 128;
  // Radiance reaching the camera from behind the volume.
  Rgb background = Rgb::Zero();
  bool jitter = false;
  std::uint64_t jitter_seed = 0;
  // Step that converts sigma to the per-voxel opacity used for thresholds.
  double reference_step = 0.25;
  RayBounds bounds;
  // Stop marching once transmittance drops below this (0 = never).
  double early_stop = 0.0;
  int threads = 1;

  // Throws kInvalidArgument on samples_per_ray < 2 or reference_step <= 0.
  void validate() const;
};

struct RaySample {
  double t = 0.0;
  double delta = 0.0;
  double density = 0.0;
  double alpha = 0.0;
  double transmittance = 1.0;
  double weight = 0.0;
  Rgb color = Rgb::Zero();
};

struct RayTrace {
  std::vector<RaySample> samples;
  double final_transmittance = 1.0;
};

struct RayResult {
  Rgb color = Rgb::Zero();
  RayTrace trace;
};

/// Front-to-back emission-absorption compositing along a ray.
///
/// Samples sit at the midpoints of samples_per_ray equal intervals of
/// [t_near, t_far] (or at a uniform random offset inside each interval when
/// jitter is on, drawn from jitter_stream). Per sample:
///   alpha_i = 1 - exp(-sigma_i delta_i),  T_i = prod_{j<i} (1 - alpha_j),
///   w_i = T_i alpha_i,  C = sum_i w_i c_i + T_end * background.
/// An empty ray returns the background and an empty trace. Non-finite field
/// values raise kCorruptGrid.
RayResult composite_ray(const VoxelGrid& grid, const Ray& ray, const RenderConfig& cfg,
                        std::uint64_t jitter_stream = 0);

// Colour only; skips building the trace.
Rgb composite_color(const VoxelGrid& grid, const Ray& ray, const RenderConfig& cfg, std::uint64_t jitter_stream = 0);

// One composite_ray per pixel, clamped to [0, 1]. Pixels are independent, so
// the result does not depend on cfg.threads.
ImageBuffer render_image(const VoxelGrid& grid, const CameraModel& camera, const RenderConfig& cfg);
std::vector<ImageBuffer> render_views(const VoxelGrid& grid, std::span<const CameraModel> cameras,
                                      const RenderConfig& cfg);

struct MediumSegment {
  double length = 0.0;
  double density = 0.0;
};

// exp(-sum length_k * sigma_k). Negative input raises kInvalidArgument.
double analytic_transmittance(std::span<const MediumSegment> segments);

/// Reference radiance through a continuous haze medium by fine midpoint
/// quadrature of the volume rendering integral
///   L = int T(x) [sigma_a L_e + sigma_s L_i] dx + T(end) * background
/// with the medium in multiple-scattering steady state (emission and
/// isotropic in-scatter both driven by the steady-state radiance). The
/// in-scatter phase integral is evaluated numerically over the sphere.
/// Independent of the voxel grid; used as the oracle for composite_ray.
Rgb rte_reference_radiance(const HazeField& medium, const Ray& ray, const Rgb& ambient, const RenderConfig& cfg,
                           int steps = 4096);

}  // namespace vxhaze
