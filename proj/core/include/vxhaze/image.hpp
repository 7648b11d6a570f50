#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vxhaze/types.hpp"

namespace vxhaze {

// H x W x 3 linear radiance, row-major with row 0 at the top.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, const Rgb& fill = Rgb::Zero());

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_); }
  bool same_shape(const ImageBuffer& o) const { return width_ == o.width_ && height_ == o.height_; }

  Rgb at(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width_ + x);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(int x, int y, const Rgb& c) {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width_ + x);
    data_[i] = static_cast<float>(c.x());
    data_[i + 1] = static_cast<float>(c.y());
    data_[i + 2] = static_cast<float>(c.z());
  }

  std::span<const float> data() const { return data_; }
  std::span<float> data() { return data_; }

  void clamp01();

  bool operator==(const ImageBuffer& o) const {
    return width_ == o.width_ && height_ == o.height_ && data_ == o.data_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

}  // namespace vxhaze
