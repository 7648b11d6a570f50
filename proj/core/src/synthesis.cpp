#include "vxhaze/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <variant>

#include "vxhaze/error.hpp"

namespace vxhaze {

const char* to_string(HazeProfileKind kind) {
  switch (kind) {
    case HazeProfileKind::kUniform: return "uniform";
    case HazeProfileKind::kHeightExponential: return "height";
    case HazeProfileKind::kLocalBlob: return "blob";
  }
  return "unknown";
}

HazeProfileKind parse_haze_profile(const std::string& name) {
  if (name == "uniform") return HazeProfileKind::kUniform;
  if (name == "height" || name == "height-exponential") return HazeProfileKind::kHeightExponential;
  if (name == "blob" || name == "local-blob") return HazeProfileKind::kLocalBlob;
  fail(ErrorCode::kInvalidArgument, "invalid haze kind '" + name + "'");
}

double HazeProfile::factor(const Vec3& p) const {
  switch (kind) {
    case HazeProfileKind::kUniform:
      return 1.0;
    case HazeProfileKind::kHeightExponential:
      return std::exp(-falloff * std::max(0.0, p.y() - base_height));
    case HazeProfileKind::kLocalBlob: {
      const double q = (p - center).squaredNorm() / (radius * radius);
      if (q >= 1.0) return 0.0;
      return (1.0 - q) * (1.0 - q);
    }
  }
  fail(ErrorCode::kUnsupportedProfile, "unsupported profile");
}

void HazeField::validate() const {
  require(std::isfinite(absorption) && std::isfinite(scattering) && absorption >= 0.0 && scattering >= 0.0,
          ErrorCode::kInvalidArgument, "haze coefficients must be finite and >= 0");
  require(emission.allFinite() && (emission.array() >= 0.0).all(), ErrorCode::kInvalidArgument,
          "haze emission must be finite and >= 0");
  require(multiscatter_retention >= 0.0 && multiscatter_retention < 1.0, ErrorCode::kSeriesDiverges,
          "series diverges: f_ms must be in [0, 1)");
  switch (profile.kind) {
    case HazeProfileKind::kUniform:
      break;
    case HazeProfileKind::kHeightExponential:
      require(std::isfinite(profile.falloff) && profile.falloff > 0.0 && std::isfinite(profile.base_height),
              ErrorCode::kInvalidArgument, "height profile needs a finite positive falloff");
      break;
    case HazeProfileKind::kLocalBlob:
      require(profile.center.allFinite() && std::isfinite(profile.radius) && profile.radius > 0.0,
              ErrorCode::kInvalidArgument, "blob profile needs a finite centre and positive radius");
      break;
    default:
      fail(ErrorCode::kUnsupportedProfile, "unsupported profile");
  }
}

Rgb absorption_attenuate(const Rgb& radiance, double sigma_a, double distance) {
  require(sigma_a >= 0.0 && distance >= 0.0, ErrorCode::kInvalidArgument,
          "absorption coefficient and distance must be >= 0");
  return radiance * std::exp(-sigma_a * distance);
}

double iterate_scatter(double g0, double f_ms, int n) {
  require(f_ms < 1.0, ErrorCode::kSeriesDiverges, "series diverges: f_ms must be < 1");
  require(f_ms >= 0.0 && n >= 0, ErrorCode::kInvalidArgument, "f_ms must be >= 0 and n >= 0");
  double order = g0;
  double total = g0;
  for (int k = 1; k <= n; ++k) {
    order *= f_ms;
    total += order;
  }
  return total;
}

double steady_state_gain(double f_ms) {
  require(f_ms < 1.0, ErrorCode::kSeriesDiverges, "series diverges: f_ms must be < 1");
  require(f_ms >= 0.0, ErrorCode::kInvalidArgument, "f_ms must be >= 0");
  return 1.0 / (1.0 - f_ms);
}

Rgb steady_state_color(const HazeField& haze, const Rgb& ambient) {
  const Rgb c = steady_state_gain(haze.multiscatter_retention) * ambient.cwiseProduct(haze.emission);
  return c.cwiseMax(0.0).cwiseMin(1.0);
}

HazeField make_haze_field(HazeProfileKind kind, const HazeParams& params, std::uint64_t seed) {
  HazeField h;
  h.absorption = params.absorption;
  h.scattering = params.scattering;
  h.emission = params.emission;
  h.multiscatter_retention = params.multiscatter_retention;
  h.profile.kind = kind;
  h.profile.falloff = params.falloff;
  h.profile.base_height = params.base_height;
  h.profile.radius = params.radius;
  if (kind == HazeProfileKind::kLocalBlob) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int a = 0; a < 3; ++a) {
      h.profile.center[a] = params.region.min[a] + u(rng) * (params.region.max[a] - params.region.min[a]);
    }
  }
  h.validate();
  return h;
}

HazeField make_haze_field(const std::string& kind, const HazeParams& params, std::uint64_t seed) {
  return make_haze_field(parse_haze_profile(kind), params, seed);
}

HazeParams haze_params_for_opacity(double alpha, double reference_step, double albedo) {
  require(albedo >= 0.0 && albedo <= 1.0, ErrorCode::kInvalidArgument, "albedo must be in [0, 1]");
  const double sigma_t = density_for_opacity(alpha, reference_step);
  HazeParams p;
  p.scattering = albedo * sigma_t;
  p.absorption = sigma_t - p.scattering;
  p.emission = {0.75, 0.78, 0.82};
  return p;
}

VoxelGrid inject_haze(const VoxelGrid& clean, const HazeField& haze, const Rgb& ambient) {
  haze.validate();
  require(ambient.allFinite() && (ambient.array() >= 0.0).all(), ErrorCode::kInvalidArgument,
          "ambient must be finite and >= 0");
  if (haze.profile.kind == HazeProfileKind::kLocalBlob && haze.extinction() > 0.0) {
    const Vec3 nearest = haze.profile.center.cwiseMax(clean.bbox().min).cwiseMin(clean.bbox().max);
    require((nearest - haze.profile.center).norm() < haze.profile.radius, ErrorCode::kDimsMismatch,
            "bbox mismatch: haze blob does not overlap the grid");
  }
  VoxelGrid out = clean;
  const Rgb steady = steady_state_color(haze, ambient);
  const GridDims d = clean.dims();
  const auto src = clean.densities();
  auto dens = out.densities();
  for (int z = 0; z < d.nz; ++z) {
    for (int y = 0; y < d.ny; ++y) {
      for (int x = 0; x < d.nx; ++x) {
        const std::size_t i = clean.index(x, y, z);
        const double sigma_h = haze.extinction_at(out.node_position(i));
        if (sigma_h <= 0.0) continue;
        // Empty nodes next to a surface carry that surface's colour so that
        // interpolation does not bleed haze colour into it; keep it that way.
        double weight = src[i];
        for (int k = std::max(z - 1, 0); k <= std::min(z + 1, d.nz - 1); ++k)
          for (int j = std::max(y - 1, 0); j <= std::min(y + 1, d.ny - 1); ++j)
            for (int m = std::max(x - 1, 0); m <= std::min(x + 1, d.nx - 1); ++m)
              weight = std::max(weight, static_cast<double>(src[clean.index(m, j, k)]));
        const Rgb c = (weight * clean.color(i) + sigma_h * steady) / (weight + sigma_h);
        dens[i] = static_cast<float>(src[i] + sigma_h);
        out.set_color(i, c.cwiseMax(0.0).cwiseMin(1.0));
      }
    }
  }
  return out;
}

ImageBuffer baseline_haze_2d(const ImageBuffer& clean, const BaselineHazeParams& params) {
  require(params.depth.size() == clean.pixel_count(), ErrorCode::kDimsMismatch,
          "depth map does not match image dims");
  require(params.beta >= 0.0 && std::isfinite(params.beta), ErrorCode::kInvalidArgument, "beta must be >= 0");
  ImageBuffer out(clean.width(), clean.height());
  for (int y = 0; y < clean.height(); ++y) {
    for (int x = 0; x < clean.width(); ++x) {
      const double d = params.depth[static_cast<std::size_t>(y) * clean.width() + x];
      require(d > 0.0, ErrorCode::kInvalidArgument, "depths must be > 0");
      const double t = params.beta == 0.0 ? 1.0 : std::exp(-params.beta * d);
      out.set(x, y, clean.at(x, y) * t + params.airlight * (1.0 - t));
    }
  }
  return out;
}

namespace {

struct BoxShape {
  Vec3 center;
  Vec3 half;
};
struct SphereShape {
  Vec3 center;
  double radius;
};
struct SlabShape {
  double y_top;
};

struct Primitive {
  std::variant<BoxShape, SphereShape, SlabShape> shape;
  Rgb base;
  Rgb accent;
  Vec3 phase;

  bool contains(const Vec3& p) const {
    if (const auto* b = std::get_if<BoxShape>(&shape)) {
      return ((p - b->center).cwiseAbs().array() <= b->half.array()).all();
    }
    if (const auto* s = std::get_if<SphereShape>(&shape)) {
      return (p - s->center).squaredNorm() <= s->radius * s->radius;
    }
    return p.y() <= std::get<SlabShape>(shape).y_top;
  }
  double bounding_radius() const {
    if (const auto* b = std::get_if<BoxShape>(&shape)) return b->half.norm();
    if (const auto* s = std::get_if<SphereShape>(&shape)) return s->radius;
    return 0.0;
  }
  Vec3 center() const {
    if (const auto* b = std::get_if<BoxShape>(&shape)) return b->center;
    if (const auto* s = std::get_if<SphereShape>(&shape)) return s->center;
    return Vec3::Zero();
  }
};

// Mixes two colours with a busy pattern: 3D checker modulated by sinusoids.
Rgb texture(const Primitive& prim, const Vec3& p, double freq) {
  const Vec3 q = freq * p + prim.phase;
  const int checker = (static_cast<int>(std::floor(q.x())) + static_cast<int>(std::floor(q.y())) +
                       static_cast<int>(std::floor(q.z()))) &
                      1;
  const double wave = 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * 0.5 * (q.x() + 0.7 * q.y() - 0.4 * q.z()));
  const double mix = 0.65 * checker + 0.35 * wave;
  return (prim.base * (1.0 - mix) + prim.accent * mix).cwiseMax(0.03).cwiseMin(0.97);
}

Rgb random_color(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  // Saturated hue, moderate value.
  const double h = 6.0 * u(rng);
  const double s = 0.5 + 0.45 * u(rng);
  const double v = 0.45 + 0.5 * u(rng);
  const double f = h - std::floor(h);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (static_cast<int>(h) % 6) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

}  // namespace

std::vector<CameraModel> make_camera_array(const CameraArraySpec& spec, const Aabb& bbox) {
  require(spec.count >= 1, ErrorCode::kInvalidArgument, "camera count must be >= 1");
  require(spec.radius > 0.5 * bbox.extent().norm(), ErrorCode::kInvalidArgument,
          "camera radius must place cameras outside the scene box");
  const Intrinsics k = Intrinsics::from_fov(spec.width, spec.height, spec.fov_deg);
  const Vec3 target = bbox.center();
  std::vector<CameraModel> cams;
  cams.reserve(static_cast<std::size_t>(spec.count));
  const double el = spec.elevation_deg * std::numbers::pi / 180.0;
  if (spec.layout == CameraLayout::kRing) {
    for (int i = 0; i < spec.count; ++i) {
      const double theta = 2.0 * std::numbers::pi * i / spec.count;
      const double e = (i % 2 == 0) ? el : -el;
      const Vec3 eye = target + spec.radius * Vec3(std::cos(e) * std::cos(theta), std::sin(e),
                                                   std::cos(e) * std::sin(theta));
      cams.push_back(CameraModel::look_at(k, eye, target));
    }
  } else {
    // Planar array facing -z, like a rig of cameras on a board.
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(spec.count))));
    const int rows = (spec.count + cols - 1) / cols;
    const double pitch = 0.35 * bbox.extent().x();
    for (int i = 0; i < spec.count; ++i) {
      const int r = i / cols;
      const int c = i % cols;
      const Vec3 eye = target + Vec3((c - 0.5 * (cols - 1)) * pitch, (r - 0.5 * (rows - 1)) * pitch, spec.radius);
      cams.push_back(CameraModel::look_at(k, eye, target));
    }
  }
  return cams;
}

ProceduralScene make_procedural_scene(const SceneSpec& spec) {
  require(spec.boxes >= 0 && spec.spheres >= 0, ErrorCode::kInvalidArgument, "primitive counts must be >= 0");
  require(spec.object_density > 0.0 && spec.texture_frequency > 0.0, ErrorCode::kInvalidArgument,
          "object density and texture frequency must be > 0");
  require(spec.size_range[0] > 0.0 && spec.size_range[0] <= spec.size_range[1], ErrorCode::kInvalidArgument,
          "invalid primitive size range");
  VoxelGrid grid(spec.dims, spec.bbox);
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Vec3 c = spec.bbox.center();
  const Vec3 half = 0.5 * spec.bbox.extent();
  const double scale = half.minCoeff();
  const double margin = 3.0 * grid.spacing().maxCoeff();

  std::vector<Primitive> prims;
  if (spec.ground_plane) {
    prims.push_back({SlabShape{spec.bbox.min.y() + 0.12 * spec.bbox.extent().y()}, random_color(rng),
                     random_color(rng), Vec3::Zero()});
  }
  const int solids = spec.boxes + spec.spheres;
  for (int n = 0; n < solids; ++n) {
    const bool is_box = n < spec.boxes;
    Primitive candidate;
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double size = scale * (spec.size_range[0] + u(rng) * (spec.size_range[1] - spec.size_range[0]));
      Vec3 extent_half;
      if (is_box) {
        extent_half = Vec3(size * (0.7 + 0.3 * u(rng)), size * (0.7 + 0.3 * u(rng)), size * (0.7 + 0.3 * u(rng)));
      } else {
        extent_half = Vec3::Constant(size);
      }
      // Keep a margin from the box faces so every surface can be seen.
      const Vec3 room = (half - extent_half - Vec3::Constant(margin)).cwiseMax(0.0);
      Vec3 center = c;
      for (int a = 0; a < 3; ++a) center[a] += (2.0 * u(rng) - 1.0) * room[a];
      if (spec.ground_plane) {
        const double floor_top = spec.bbox.min.y() + 0.12 * spec.bbox.extent().y();
        center.y() = std::max(center.y(), floor_top + extent_half.y() + margin);
      }
      if (is_box) {
        candidate.shape = BoxShape{center, extent_half};
      } else {
        candidate.shape = SphereShape{center, size};
      }
      bool clear = true;
      for (const Primitive& other : prims) {
        if (std::holds_alternative<SlabShape>(other.shape)) continue;
        const double gap = (other.center() - center).norm() - other.bounding_radius() - candidate.bounding_radius();
        if (gap < margin) {
          clear = false;
          break;
        }
      }
      if (clear) break;
    }
    candidate.base = random_color(rng);
    candidate.accent = random_color(rng);
    candidate.phase = Vec3(u(rng), u(rng), u(rng)) * 4.0;
    prims.push_back(candidate);
  }

  auto dens = grid.densities();
  std::size_t occupied = 0;
  for (std::size_t i = 0; i < grid.voxel_count(); ++i) {
    const Vec3 p = grid.node_position(i);
    for (const Primitive& prim : prims) {
      if (prim.contains(p)) {
        dens[i] = static_cast<float>(spec.object_density);
        grid.set_color(i, texture(prim, p, spec.texture_frequency));
        ++occupied;
        break;
      }
    }
  }
  if (static_cast<double>(occupied) > 0.9 * static_cast<double>(grid.voxel_count())) {
    fail(ErrorCode::kSceneTooDense, "scene too dense");
  }

  // Copy surface colours one node outward so interpolation at object edges
  // does not blend toward black.
  const GridDims d = grid.dims();
  const std::vector<float> solid(dens.begin(), dens.end());
  for (int z = 0; z < d.nz; ++z) {
    for (int y = 0; y < d.ny; ++y) {
      for (int x = 0; x < d.nx; ++x) {
        const std::size_t i = grid.index(x, y, z);
        if (solid[i] > 0.0f) continue;
        const int nb[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
        for (const auto& o : nb) {
          const int xx = x + o[0], yy = y + o[1], zz = z + o[2];
          if (xx < 0 || yy < 0 || zz < 0 || xx >= d.nx || yy >= d.ny || zz >= d.nz) continue;
          const std::size_t j = grid.index(xx, yy, zz);
          if (solid[j] > 0.0f) {
            grid.set_color(i, grid.color(j));
            break;
          }
        }
      }
    }
  }
  return {std::move(grid), make_camera_array(spec.cameras, spec.bbox)};
}

}  // namespace vxhaze
