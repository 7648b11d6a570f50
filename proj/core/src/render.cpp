#include "vxhaze/render.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "vxhaze/error.hpp"
#include "vxhaze/parallel.hpp"
#include "vxhaze/synthesis.hpp"
#include "render_detail.hpp"

namespace vxhaze {

void RenderConfig::validate() const {
  require(samples_per_ray >= 2, ErrorCode::kInvalidArgument, "samples_per_ray must be >= 2");
  require(reference_step > 0.0 && std::isfinite(reference_step), ErrorCode::kInvalidArgument,
          "reference_step must be > 0");
  require(background.allFinite(), ErrorCode::kInvalidArgument, "background must be finite");
  require(bounds.near >= 0.0 && bounds.near < bounds.far, ErrorCode::kInvalidArgument,
          "ray bounds need 0 <= near < far");
  require(early_stop >= 0.0 && early_stop < 1.0, ErrorCode::kInvalidArgument, "early_stop must be in [0, 1)");
}

namespace detail {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finaliser over the combined key
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void sample_offsets(const RenderConfig& cfg, std::uint64_t stream, std::vector<double>& offsets) {
  offsets.resize(static_cast<std::size_t>(cfg.samples_per_ray));
  if (!cfg.jitter) {
    std::fill(offsets.begin(), offsets.end(), 0.5);
    return;
  }
  std::mt19937_64 rng(mix_seed(cfg.jitter_seed, stream));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& o : offsets) o = u(rng);
}

}  // namespace detail

namespace {

struct FieldValue {
  double density;
  Rgb color;
};

inline FieldValue lookup(const VoxelGrid& grid, const Vec3& p) {
  FieldValue v{0.0, Rgb::Zero()};
  const auto st = grid.stencil(p);
  if (!st) return v;
  const float* dens = grid.densities().data();
  const float* col = grid.colors().data();
  double r = 0.0, g = 0.0, b = 0.0;
  for (int c = 0; c < 8; ++c) {
    const std::size_t i = st->index[c];
    const double w = st->weight[c];
    v.density += w * dens[i];
    r += w * col[3 * i];
    g += w * col[3 * i + 1];
    b += w * col[3 * i + 2];
  }
  v.color = {r, g, b};
  if (!std::isfinite(v.density) || !v.color.allFinite()) fail(ErrorCode::kCorruptGrid, "corrupt grid");
  return v;
}

template <typename OnSample>
double march(const VoxelGrid& grid, const Ray& ray, const RenderConfig& cfg, std::uint64_t stream, Rgb& color,
             OnSample&& on_sample) {
  thread_local std::vector<double> offsets;
  detail::sample_offsets(cfg, stream, offsets);
  const int n = cfg.samples_per_ray;
  const double delta = (ray.t_far - ray.t_near) / n;
  double transmittance = 1.0;
  color.setZero();
  for (int i = 0; i < n; ++i) {
    const double t = ray.t_near + (i + offsets[static_cast<std::size_t>(i)]) * delta;
    const FieldValue f = lookup(grid, ray.at(t));
    const double keep = std::exp(-f.density * delta);
    const double alpha = 1.0 - keep;
    const double weight = transmittance * alpha;
    color += weight * f.color;
    on_sample(RaySample{t, delta, f.density, alpha, transmittance, weight, f.color});
    transmittance *= keep;
    if (transmittance < cfg.early_stop) break;
  }
  return transmittance;
}

}  // namespace

RayResult composite_ray(const VoxelGrid& grid, const Ray& ray, const RenderConfig& cfg, std::uint64_t jitter_stream) {
  RayResult out;
  if (ray.empty()) {
    out.color = cfg.background;
    return out;
  }
  out.trace.samples.reserve(static_cast<std::size_t>(cfg.samples_per_ray));
  out.trace.final_transmittance = march(grid, ray, cfg, jitter_stream, out.color,
                                        [&](const RaySample& s) { out.trace.samples.push_back(s); });
  out.color += out.trace.final_transmittance * cfg.background;
  return out;
}

Rgb composite_color(const VoxelGrid& grid, const Ray& ray, const RenderConfig& cfg, std::uint64_t jitter_stream) {
  if (ray.empty()) return cfg.background;
  Rgb color;
  const double t_end = march(grid, ray, cfg, jitter_stream, color, [](const RaySample&) {});
  return color + t_end * cfg.background;
}

ImageBuffer render_image(const VoxelGrid& grid, const CameraModel& camera, const RenderConfig& cfg) {
  cfg.validate();
  ImageBuffer image(camera.width(), camera.height());
  const int w = camera.width();
  parallel_for(static_cast<std::size_t>(camera.height()), cfg.threads, [&](std::size_t y0, std::size_t y1, int) {
    for (std::size_t y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        const Ray ray = camera_ray_unchecked(camera, x, static_cast<double>(y), grid.bbox(), cfg.bounds);
        const std::uint64_t stream = y * static_cast<std::uint64_t>(w) + static_cast<std::uint64_t>(x);
        image.set(x, static_cast<int>(y), composite_color(grid, ray, cfg, stream));
      }
    }
  });
  image.clamp01();
  return image;
}

std::vector<ImageBuffer> render_views(const VoxelGrid& grid, std::span<const CameraModel> cameras,
                                      const RenderConfig& cfg) {
  std::vector<ImageBuffer> out;
  out.reserve(cameras.size());
  for (const CameraModel& cam : cameras) out.push_back(render_image(grid, cam, cfg));
  return out;
}

double analytic_transmittance(std::span<const MediumSegment> segments) {
  double depth = 0.0;
  for (const MediumSegment& s : segments) {
    require(s.length >= 0.0 && s.density >= 0.0 && std::isfinite(s.length) && std::isfinite(s.density),
            ErrorCode::kInvalidArgument, "segment length and density must be finite and >= 0");
    depth += s.length * s.density;
  }
  return std::exp(-depth);
}

namespace {

// Integral over the sphere of an isotropic phase function against a constant
// incident radiance, by a midpoint rule in (cos theta, phi).
double isotropic_inscatter_factor() {
  constexpr int kMu = 64;
  constexpr int kPhi = 128;
  constexpr double kPhase = 1.0 / (4.0 * std::numbers::pi);
  const double dmu = 2.0 / kMu;
  const double dphi = 2.0 * std::numbers::pi / kPhi;
  double sum = 0.0;
  for (int i = 0; i < kMu; ++i) {
    for (int j = 0; j < kPhi; ++j) sum += kPhase * dmu * dphi;
  }
  return sum;
}

}  // namespace

Rgb rte_reference_radiance(const HazeField& medium, const Ray& ray, const Rgb& ambient, const RenderConfig& cfg,
                           int steps) {
  medium.validate();
  require(steps >= 4096, ErrorCode::kInvalidArgument, "reference quadrature needs >= 4096 steps");
  switch (medium.profile.kind) {
    case HazeProfileKind::kUniform:
    case HazeProfileKind::kHeightExponential:
    case HazeProfileKind::kLocalBlob:
      break;
    default:
      fail(ErrorCode::kUnsupportedProfile, "unsupported profile");
  }
  if (ray.empty()) return cfg.background;

  const Rgb steady = steady_state_color(medium, ambient);
  const double inscatter = isotropic_inscatter_factor();
  const double peak = medium.extinction();
  const double absorb_share = peak > 0.0 ? medium.absorption / peak : 0.0;
  const double scatter_share = peak > 0.0 ? medium.scattering / peak : 0.0;

  const double dx = (ray.t_far - ray.t_near) / steps;
  double depth = 0.0;
  Rgb radiance = Rgb::Zero();
  for (int i = 0; i < steps; ++i) {
    const Vec3 p = ray.at(ray.t_near + (i + 0.5) * dx);
    const double factor = medium.profile.factor(p);
    const double sigma_t = peak * factor;
    const double sigma_a = absorb_share * sigma_t;
    const double sigma_s = scatter_share * sigma_t;
    const double t_mid = std::exp(-(depth + 0.5 * sigma_t * dx));
    radiance += t_mid * (sigma_a * steady + sigma_s * inscatter * steady) * dx;
    depth += sigma_t * dx;
  }
  return radiance + std::exp(-depth) * cfg.background;
}

}  // namespace vxhaze
