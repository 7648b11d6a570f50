#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <Eigen/LU>

namespace vxhaze {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
// Linear-radiance RGB triple.
using Rgb = Eigen::Vector3d;

struct Aabb {
  Vec3 min = Vec3::Constant(-1.0);
  Vec3 max = Vec3::Constant(1.0);

  Vec3 extent() const { return max - min; }
  Vec3 center() const { return 0.5 * (min + max); }
  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool operator==(const Aabb& o) const { return min == o.min && max == o.max; }
};

}  // namespace vxhaze
