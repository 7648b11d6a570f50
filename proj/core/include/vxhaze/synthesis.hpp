#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vxhaze/camera.hpp"
#include "vxhaze/grid.hpp"
#include "vxhaze/image.hpp"

namespace vxhaze {

// Spatial profile of haze extinction, as a factor in [0, 1] times the peak.
enum class HazeProfileKind { kUniform, kHeightExponential, kLocalBlob };

const char* to_string(HazeProfileKind kind);
HazeProfileKind parse_haze_profile(const std::string& name);

struct HazeProfile {
  HazeProfileKind kind = HazeProfileKind::kUniform;
  // Height-exponential: factor = exp(-falloff * max(0, y - base_height)).
  double falloff = 1.0;
  double base_height = -1.0;
  // Local blob: factor = (1 - (r / radius)^2)^2 inside radius, 0 outside.
  Vec3 center = Vec3::Zero();
  double radius = 0.5;

  double factor(const Vec3& p) const;
};

/// Participating medium: absorption sigma_a, out-scattering sigma_s (both at
/// the profile peak), emission colour L_e, and the per-order fraction f_ms of
/// scattered light retained by the next scattering order.
struct HazeField {
  double absorption = 0.0;
  double scattering = 0.0;
  Rgb emission = Rgb::Ones();
  HazeProfile profile;
  double multiscatter_retention = 0.0;

  double extinction() const { return absorption + scattering; }
  double extinction_at(const Vec3& p) const { return extinction() * profile.factor(p); }
  void validate() const;
};

// L0 * exp(-sigma_a * distance).
Rgb absorption_attenuate(const Rgb& radiance, double sigma_a, double distance);
// G0 * sum_{k=0..n} f_ms^k.
double iterate_scatter(double g0, double f_ms, int n);
// 1 / (1 - f_ms).
double steady_state_gain(double f_ms);
// Steady-state radiance of the medium: gain(f_ms) * (ambient * L_e), clamped to [0, 1].
Rgb steady_state_color(const HazeField& haze, const Rgb& ambient);

struct HazeParams {
  double absorption = 0.0;
  double scattering = 0.0;
  Rgb emission = Rgb::Ones();
  double multiscatter_retention = 0.3;
  double falloff = 1.5;
  double base_height = -1.0;
  double radius = 0.6;
  // Blob centre is drawn from the seed inside this box.
  Aabb region = {Vec3::Constant(-0.4), Vec3::Constant(0.4)};
};

HazeField make_haze_field(HazeProfileKind kind, const HazeParams& params, std::uint64_t seed);
// Same, with kind given by name: "uniform", "height", "blob".
HazeField make_haze_field(const std::string& kind, const HazeParams& params, std::uint64_t seed);

// Haze with peak per-voxel opacity alpha at the reference step, split into
// absorption and scattering by the single-scattering albedo.
HazeParams haze_params_for_opacity(double alpha, double reference_step, double albedo = 0.9);

/// Adds haze to a clean grid: sigma' = sigma_clean + sigma_haze, and the
/// colour is the emission-weighted blend
/// c' = (w c_clean + sigma_haze c_steady) / (w + sigma_haze), where w is the
/// largest clean sigma in the node's 3x3x3 neighbourhood (so surface colour
/// skirts survive). Vacuum haze is the identity.
VoxelGrid inject_haze(const VoxelGrid& clean, const HazeField& haze, const Rgb& ambient);

struct BaselineHazeParams {
  double beta = 0.0;
  Rgb airlight = Rgb::Ones();
  // Per-pixel scene depth, row-major, width * height entries.
  std::vector<double> depth;
};

// I = R t + L (1 - t), t = exp(-beta d), per pixel.
ImageBuffer baseline_haze_2d(const ImageBuffer& clean, const BaselineHazeParams& params);

enum class CameraLayout { kRing, kGrid };

struct CameraArraySpec {
  CameraLayout layout = CameraLayout::kRing;
  int count = 20;
  double radius = 3.2;
  // Ring cameras alternate between +elevation and -elevation.
  double elevation_deg = 25.0;
  int width = 64;
  int height = 64;
  double fov_deg = 50.0;
};

struct SceneSpec {
  std::uint64_t seed = 1;
  int boxes = 2;
  int spheres = 2;
  bool ground_plane = false;
  // Texture cycles per world unit.
  double texture_frequency = 3.0;
  // Primitive half-size range as a fraction of the smallest box half-extent.
  std::array<double, 2> size_range = {0.18, 0.34};
  GridDims dims = {64, 64, 64};
  Aabb bbox;
  // Object extinction; sigma * reference_step >= 5 keeps objects near-opaque.
  double object_density = 80.0;
  CameraArraySpec cameras;
};

struct ProceduralScene {
  VoxelGrid grid;
  std::vector<CameraModel> cameras;
};

// Seed-deterministic textured primitives and a camera array aimed at the box
// centre. Raises kSceneTooDense if objects cover more than 90% of the box.
ProceduralScene make_procedural_scene(const SceneSpec& spec);
std::vector<CameraModel> make_camera_array(const CameraArraySpec& spec, const Aabb& bbox);

}  // namespace vxhaze
