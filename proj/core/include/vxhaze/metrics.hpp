#pragma once

#include <limits>
#include <span>

#include "vxhaze/image.hpp"

namespace vxhaze {

// Returned by psnr() for identical images.
inline constexpr double kPsnrInfinity = std::numeric_limits<double>::infinity();

struct MetricTriple {
  double psnr = kPsnrInfinity;
  double ssim = 1.0;
  double ciede2000 = 0.0;
};

// 10 log10(1 / MSE) over all channels with peak 1.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

// Mean single-scale SSIM on Rec.601 luma: 11x11 Gaussian window (sigma 1.5),
// valid region only, C1 = 0.01^2, C2 = 0.03^2.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};

// Linear sRGB primaries -> CIELAB, D65 white.
Lab linear_rgb_to_lab(const Rgb& rgb);
double delta_e2000(const Lab& x, const Lab& y);
// Mean per-pixel CIEDE2000 between two linear images.
double ciede2000(const ImageBuffer& a, const ImageBuffer& b);

MetricTriple compare(const ImageBuffer& a, const ImageBuffer& b);

// PSNR over the concatenation of all image pairs; mean SSIM over pairs.
double pooled_psnr(std::span<const ImageBuffer> a, std::span<const ImageBuffer> b);
double mean_ssim(std::span<const ImageBuffer> a, std::span<const ImageBuffer> b);

}  // namespace vxhaze
