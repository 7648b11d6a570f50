#include "vxhaze/image.hpp"

#include <algorithm>

#include "vxhaze/error.hpp"

namespace vxhaze {

ImageBuffer::ImageBuffer(int width, int height, const Rgb& fill) : width_(width), height_(height) {
  require(width >= 1 && height >= 1, ErrorCode::kInvalidArgument, "image size must be >= 1");
  data_.resize(3 * pixel_count());
  for (std::size_t i = 0; i < pixel_count(); ++i) {
    data_[3 * i] = static_cast<float>(fill.x());
    data_[3 * i + 1] = static_cast<float>(fill.y());
    data_[3 * i + 2] = static_cast<float>(fill.z());
  }
}

void ImageBuffer::clamp01() {
  for (float& v : data_) v = std::clamp(v, 0.0f, 1.0f);
}

}  // namespace vxhaze
