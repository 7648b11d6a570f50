#pragma once

#include <optional>
#include <utility>

#include "vxhaze/types.hpp"

namespace vxhaze {

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.5;
  double cy = 0.5;
  int width = 1;
  int height = 1;

  static Intrinsics from_fov(int width, int height, double horizontal_fov_deg);
  bool operator==(const Intrinsics&) const = default;
};

// Camera-to-world rigid transform.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  bool operator==(const Pose& o) const { return rotation == o.rotation && translation == o.translation; }
};

// Pinhole camera. Right-handed; the camera looks down -z of its own frame
// with +x right and +y up. Pixel rows grow downward.
class CameraModel {
 public:
  CameraModel(Intrinsics intrinsics, Pose pose);

  static CameraModel look_at(const Intrinsics& intrinsics, const Vec3& eye, const Vec3& target,
                             const Vec3& up = Vec3::UnitY());

  const Intrinsics& intrinsics() const { return intrinsics_; }
  const Pose& pose() const { return pose_; }
  int width() const { return intrinsics_.width; }
  int height() const { return intrinsics_.height; }
  Vec3 center() const { return pose_.translation; }
  Vec3 forward() const { return -pose_.rotation.col(2); }

  bool operator==(const CameraModel& o) const { return intrinsics_ == o.intrinsics_ && pose_ == o.pose_; }

 private:
  Intrinsics intrinsics_;
  Pose pose_;
};

// Global clamp applied on top of the ray/box intersection.
struct RayBounds {
  double near = 1e-3;
  double far = 1e4;
};

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = -Vec3::UnitZ();
  double t_near = 0.0;
  double t_far = 0.0;

  bool empty() const { return !(t_near < t_far); }
  Vec3 at(double t) const { return origin + t * direction; }
};

// Slab test; returns the [t0, t1] overlap of the line with the box, if any.
std::optional<std::pair<double, double>> intersect(const Aabb& box, const Vec3& origin, const Vec3& direction);

// Builds a normalised ray through the centre of pixel (u, v), i.e. through
// continuous image coordinates (u + 0.5, v + 0.5). t range comes from the box
// intersection clamped to bounds; a miss yields t_near == t_far.
Ray make_camera_ray(const CameraModel& camera, double u, double v, const Aabb& target, const RayBounds& bounds = {});

// Unchecked variant for inner loops.
Ray camera_ray_unchecked(const CameraModel& camera, double u, double v, const Aabb& target, const RayBounds& bounds);

}  // namespace vxhaze
