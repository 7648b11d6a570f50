#pragma once

#include <cstdint>
#include <vector>

#include "vxhaze/render.hpp"

namespace vxhaze::detail {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);
// Per-interval sample offsets in [0, 1); 0.5 everywhere without jitter.
void sample_offsets(const RenderConfig& cfg, std::uint64_t stream, std::vector<double>& offsets);

}  // namespace vxhaze::detail
