#include "vxhaze/dataset.hpp"

#include <string>

#include "vxhaze/error.hpp"

namespace vxhaze {

void MultiViewDataset::validate() const {
  require(!views.empty(), ErrorCode::kInvalidArgument, "dataset has no views");
  for (std::size_t i = 0; i < views.size(); ++i) {
    const View& v = views[i];
    require(v.image.same_shape(views.front().image), ErrorCode::kInvalidArgument,
            "view " + std::to_string(i) + " image dims differ from view 0");
    require(v.image.width() == v.camera.width() && v.image.height() == v.camera.height(),
            ErrorCode::kInvalidArgument, "view " + std::to_string(i) + " image does not match its camera");
  }
}

MultiViewDataset MultiViewDataset::select(const std::vector<int>& indices) const {
  MultiViewDataset out;
  out.meta = meta;
  out.ground_truth = ground_truth;
  out.views.reserve(indices.size());
  for (int i : indices) {
    require(i >= 0 && static_cast<std::size_t>(i) < views.size(), ErrorCode::kInvalidArgument,
            "view index " + std::to_string(i) + " not in dataset");
    out.views.push_back(views[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace vxhaze
