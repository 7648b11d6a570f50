#include "vxhaze/camera.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vxhaze/error.hpp"

namespace vxhaze {

Intrinsics Intrinsics::from_fov(int width, int height, double horizontal_fov_deg) {
  require(width >= 1 && height >= 1, ErrorCode::kInvalidArgument, "image size must be >= 1");
  require(horizontal_fov_deg > 0.0 && horizontal_fov_deg < 180.0, ErrorCode::kInvalidArgument,
          "field of view must be in (0, 180)");
  const double f = 0.5 * width / std::tan(0.5 * horizontal_fov_deg * std::numbers::pi / 180.0);
  return {f, f, 0.5 * width, 0.5 * height, width, height};
}

CameraModel::CameraModel(Intrinsics intrinsics, Pose pose) : intrinsics_(intrinsics), pose_(std::move(pose)) {
  require(intrinsics_.fx > 0.0 && intrinsics_.fy > 0.0 && std::isfinite(intrinsics_.fx) &&
              std::isfinite(intrinsics_.fy),
          ErrorCode::kInvalidArgument, "focal lengths must be positive");
  require(intrinsics_.width >= 1 && intrinsics_.height >= 1, ErrorCode::kInvalidArgument,
          "image size must be >= 1");
  const Mat3& r = pose_.rotation;
  require(r.allFinite() && pose_.translation.allFinite(), ErrorCode::kInvalidArgument, "pose must be finite");
  const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
  require(ortho <= 1e-6 && std::abs(r.determinant() - 1.0) <= 1e-6, ErrorCode::kInvalidArgument,
          "camera rotation must be orthonormal with determinant +1");
}

CameraModel CameraModel::look_at(const Intrinsics& intrinsics, const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 back = (eye - target).normalized();
  Vec3 right = up.cross(back);
  if (right.norm() < 1e-9) right = Vec3::UnitX().cross(back);
  right.normalize();
  const Vec3 true_up = back.cross(right);
  Pose pose;
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = true_up;
  pose.rotation.col(2) = back;
  pose.translation = eye;
  return CameraModel(intrinsics, pose);
}

std::optional<std::pair<double, double>> intersect(const Aabb& box, const Vec3& origin, const Vec3& direction) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (direction[a] == 0.0) {
      if (origin[a] < box.min[a] || origin[a] > box.max[a]) return std::nullopt;
      continue;
    }
    const double inv = 1.0 / direction[a];
    double ta = (box.min[a] - origin[a]) * inv;
    double tb = (box.max[a] - origin[a]) * inv;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1) return std::nullopt;
  return std::make_pair(t0, t1);
}

Ray camera_ray_unchecked(const CameraModel& camera, double u, double v, const Aabb& target, const RayBounds& bounds) {
  const Intrinsics& k = camera.intrinsics();
  const Vec3 local((u + 0.5 - k.cx) / k.fx, -(v + 0.5 - k.cy) / k.fy, -1.0);
  Ray ray;
  ray.origin = camera.pose().translation;
  ray.direction = (camera.pose().rotation * local).normalized();
  const auto hit = intersect(target, ray.origin, ray.direction);
  if (hit) {
    ray.t_near = std::max(hit->first, bounds.near);
    ray.t_far = std::min(hit->second, bounds.far);
  }
  if (!hit || !(ray.t_near < ray.t_far)) {
    ray.t_near = bounds.near;
    ray.t_far = bounds.near;
  }
  return ray;
}

Ray make_camera_ray(const CameraModel& camera, double u, double v, const Aabb& target, const RayBounds& bounds) {
  require(std::isfinite(u) && std::isfinite(v) && u >= 0.0 && v >= 0.0 && u < camera.width() &&
              v < camera.height(),
          ErrorCode::kPixelOutOfBounds, "pixel out of bounds");
  require(bounds.near >= 0.0 && bounds.near < bounds.far, ErrorCode::kInvalidArgument,
          "ray bounds need 0 <= near < far");
  return camera_ray_unchecked(camera, u, v, target, bounds);
}

}  // namespace vxhaze
