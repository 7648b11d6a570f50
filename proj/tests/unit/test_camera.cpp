#include <cmath>
#include <random>

#include "helpers.hpp"
#include "vxhaze/camera.hpp"

using namespace vxhaze;

namespace {

CameraModel identity_camera(int w = 64, int h = 48) {
  return CameraModel(Intrinsics::from_fov(w, h, 60.0), Pose{});
}

}  // namespace

TEST_CASE("principal pixel looks down the optical axis") {
  const CameraModel cam = identity_camera();
  const auto& k = cam.intrinsics();
  const Ray r = make_camera_ray(cam, k.cx - 0.5, k.cy - 0.5, {Vec3(-1, -1, -5), Vec3(1, 1, -3)});
  CHECK((r.direction - Vec3(0, 0, -1)).norm() < 1e-12);
  CHECK(r.t_near == doctest::Approx(3.0));
  CHECK(r.t_far == doctest::Approx(5.0));
}

TEST_CASE("image axes: +x right, rows grow downward") {
  const CameraModel cam = identity_camera();
  const Aabb box{Vec3(-1, -1, -5), Vec3(1, 1, -3)};
  CHECK(make_camera_ray(cam, 63, 24, box).direction.x() > 0.0);
  CHECK(make_camera_ray(cam, 32, 0, box).direction.y() > 0.0);
  CHECK(make_camera_ray(cam, 32, 47, box).direction.y() < 0.0);
}

TEST_CASE("camera ray directions are unit length") {
  const CameraModel cam = CameraModel::look_at(Intrinsics::from_fov(40, 30, 70.0), {2, 1, 3}, {0, 0, 0});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const Ray r = make_camera_ray(cam, u(rng) * 39.999, u(rng) * 29.999, {});
    CHECK(r.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("ray that misses the box is empty") {
  const CameraModel cam = identity_camera();
  const Ray r = make_camera_ray(cam, 31.5, 23.5, {Vec3(5, 5, -5), Vec3(6, 6, -3)});
  CHECK(r.t_near == r.t_far);
  CHECK(r.empty());
}

TEST_CASE("out-of-bounds pixels are rejected") {
  const CameraModel cam = identity_camera();
  CHECK_ERROR_CODE(make_camera_ray(cam, -0.1, 3, {}), ErrorCode::kPixelOutOfBounds);
  CHECK_ERROR_CODE(make_camera_ray(cam, 64.0, 3, {}), ErrorCode::kPixelOutOfBounds);
  CHECK_ERROR_CODE(make_camera_ray(cam, 3, 48.0, {}), ErrorCode::kPixelOutOfBounds);
}

TEST_CASE("look_at points the forward axis at the target") {
  const Vec3 eye(3, 2, -1), target(0.2, -0.1, 0.3);
  const CameraModel cam = CameraModel::look_at(Intrinsics::from_fov(8, 8, 50.0), eye, target);
  CHECK((cam.forward() - (target - eye).normalized()).norm() < 1e-12);
  const Mat3& R = cam.pose().rotation;
  CHECK((R.transpose() * R - Mat3::Identity()).norm() < 1e-12);
  CHECK(R.determinant() == doctest::Approx(1.0));
}

TEST_CASE("slab intersection handles axis-parallel rays") {
  const Aabb box{};
  const auto hit = intersect(box, {0.5, 0.5, 4.0}, {0, 0, -1});
  REQUIRE(hit.has_value());
  CHECK(hit->first == doctest::Approx(3.0));
  CHECK(hit->second == doctest::Approx(5.0));
  CHECK_FALSE(intersect(box, {2.0, 0.5, 4.0}, {0, 0, -1}).has_value());
}
