#include "vxhaze/metrics.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "vxhaze/error.hpp"

namespace vxhaze {

namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b) {
  require(a.same_shape(b) && a.pixel_count() > 0, ErrorCode::kDimsMismatch, "image dims mismatch");
}

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> luma(const ImageBuffer& img) {
  std::vector<double> y(img.pixel_count());
  const auto d = img.data();
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = 0.299 * d[3 * i] + 0.587 * d[3 * i + 1] + 0.114 * d[3 * i + 2];
  }
  return y;
}

std::vector<double> gaussian_kernel() {
  std::vector<double> k(kWindow);
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kWindow / 2;
    k[i] = std::exp(-x * x / (2.0 * kWindowSigma * kWindowSigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable valid-region filter; output is (w - 10) x (h - 10).
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h, const std::vector<double>& k) {
  const int ow = w - kWindow + 1;
  const int oh = h - kWindow + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kWindow; ++i) s += k[i] * src[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kWindow; ++i) s += k[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  const auto da = a.data();
  const auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double e = static_cast<double>(da[i]) - static_cast<double>(db[i]);
    sum += e * e;
  }
  if (sum == 0.0) return kPsnrInfinity;
  return -10.0 * std::log10(sum / static_cast<double>(da.size()));
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  require(a.width() >= kWindow && a.height() >= kWindow, ErrorCode::kInvalidArgument,
          "image smaller than the 11x11 SSIM window");
  const int w = a.width();
  const int h = a.height();
  const std::vector<double> ya = luma(a);
  const std::vector<double> yb = luma(b);
  std::vector<double> aa(ya.size()), bb(ya.size()), ab(ya.size());
  for (std::size_t i = 0; i < ya.size(); ++i) {
    aa[i] = ya[i] * ya[i];
    bb[i] = yb[i] * yb[i];
    ab[i] = ya[i] * yb[i];
  }
  const auto k = gaussian_kernel();
  const auto mu_a = filter_valid(ya, w, h, k);
  const auto mu_b = filter_valid(yb, w, h, k);
  const auto e_aa = filter_valid(aa, w, h, k);
  const auto e_bb = filter_valid(bb, w, h, k);
  const auto e_ab = filter_valid(ab, w, h, k);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double ma = mu_a[i];
    const double mb = mu_b[i];
    const double va = e_aa[i] - ma * ma;
    const double vb = e_bb[i] - mb * mb;
    const double cov = e_ab[i] - ma * mb;
    total += ((2.0 * ma * mb + kC1) * (2.0 * cov + kC2)) / ((ma * ma + mb * mb + kC1) * (va + vb + kC2));
  }
  return total / static_cast<double>(mu_a.size());
}

Lab linear_rgb_to_lab(const Rgb& rgb) {
  // sRGB primaries, D65.
  const double x = 0.4124564 * rgb.x() + 0.3575761 * rgb.y() + 0.1804375 * rgb.z();
  const double y = 0.2126729 * rgb.x() + 0.7151522 * rgb.y() + 0.0721750 * rgb.z();
  const double z = 0.0193339 * rgb.x() + 0.1191920 * rgb.y() + 0.9503041 * rgb.z();
  constexpr double kXn = 0.95047, kYn = 1.0, kZn = 1.08883;
  constexpr double kDelta = 6.0 / 29.0;
  auto f = [&](double t) {
    return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
  };
  const double fx = f(x / kXn), fy = f(y / kYn), fz = f(z / kZn);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double delta_e2000(const Lab& p, const Lab& q) {
  const double c1 = std::hypot(p.a, p.b);
  const double c2 = std::hypot(q.a, q.b);
  const double c_bar = 0.5 * (c1 + c2);
  const double c_bar7 = std::pow(c_bar, 7.0);
  const double g = 0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + std::pow(25.0, 7.0))));
  const double a1 = (1.0 + g) * p.a;
  const double a2 = (1.0 + g) * q.a;
  const double cp1 = std::hypot(a1, p.b);
  const double cp2 = std::hypot(a2, q.b);
  auto hue = [](double b, double a) {
    if (a == 0.0 && b == 0.0) return 0.0;
    double h = deg(std::atan2(b, a));
    return h < 0.0 ? h + 360.0 : h;
  };
  const double h1 = hue(p.b, a1);
  const double h2 = hue(q.b, a2);

  const double d_l = q.l - p.l;
  const double d_c = cp2 - cp1;
  double dh = 0.0;
  if (cp1 * cp2 != 0.0) {
    dh = h2 - h1;
    if (dh > 180.0) dh -= 360.0;
    else if (dh < -180.0) dh += 360.0;
  }
  const double d_h = 2.0 * std::sqrt(cp1 * cp2) * std::sin(rad(dh) / 2.0);

  const double l_bar = 0.5 * (p.l + q.l);
  const double cp_bar = 0.5 * (cp1 + cp2);
  double h_bar = h1 + h2;
  if (cp1 * cp2 != 0.0) {
    if (std::abs(h1 - h2) <= 180.0) h_bar *= 0.5;
    else if (h1 + h2 < 360.0) h_bar = 0.5 * (h1 + h2 + 360.0);
    else h_bar = 0.5 * (h1 + h2 - 360.0);
  }
  const double t = 1.0 - 0.17 * std::cos(rad(h_bar - 30.0)) + 0.24 * std::cos(rad(2.0 * h_bar)) +
                   0.32 * std::cos(rad(3.0 * h_bar + 6.0)) - 0.20 * std::cos(rad(4.0 * h_bar - 63.0));
  const double d_theta = 30.0 * std::exp(-std::pow((h_bar - 275.0) / 25.0, 2.0));
  const double cp_bar7 = std::pow(cp_bar, 7.0);
  const double r_c = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + std::pow(25.0, 7.0)));
  const double l50 = (l_bar - 50.0) * (l_bar - 50.0);
  const double s_l = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
  const double s_c = 1.0 + 0.045 * cp_bar;
  const double s_h = 1.0 + 0.015 * cp_bar * t;
  const double r_t = -std::sin(rad(2.0 * d_theta)) * r_c;
  const double tl = d_l / s_l;
  const double tc = d_c / s_c;
  const double th = d_h / s_h;
  return std::sqrt(tl * tl + tc * tc + th * th + r_t * tc * th);
}

double ciede2000(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b);
  double sum = 0.0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      sum += delta_e2000(linear_rgb_to_lab(a.at(x, y)), linear_rgb_to_lab(b.at(x, y)));
    }
  }
  return sum / static_cast<double>(a.pixel_count());
}

MetricTriple compare(const ImageBuffer& a, const ImageBuffer& b) { return {psnr(a, b), ssim(a, b), ciede2000(a, b)}; }

double pooled_psnr(std::span<const ImageBuffer> a, std::span<const ImageBuffer> b) {
  require(a.size() == b.size() && !a.empty(), ErrorCode::kDimsMismatch, "image sets differ in size or are empty");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t v = 0; v < a.size(); ++v) {
    require(a[v].same_shape(b[v]), ErrorCode::kDimsMismatch, "image dims mismatch");
    const auto da = a[v].data();
    const auto db = b[v].data();
    for (std::size_t i = 0; i < da.size(); ++i) {
      const double e = static_cast<double>(da[i]) - db[i];
      sum += e * e;
    }
    n += da.size();
  }
  if (sum == 0.0) return kPsnrInfinity;
  return -10.0 * std::log10(sum / static_cast<double>(n));
}

double mean_ssim(std::span<const ImageBuffer> a, std::span<const ImageBuffer> b) {
  require(a.size() == b.size() && !a.empty(), ErrorCode::kDimsMismatch, "image sets differ in size or are empty");
  double s = 0.0;
  for (std::size_t v = 0; v < a.size(); ++v) s += ssim(a[v], b[v]);
  return s / static_cast<double>(a.size());
}

}  // namespace vxhaze
