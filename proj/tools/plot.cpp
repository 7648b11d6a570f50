#include "plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "vxhaze/io.hpp"

namespace vxhaze::plot {
namespace {

// 3x5 glyphs, one row per entry, bit 2 = left column.
struct Glyph {
  char c;
  std::array<unsigned char, 5> rows;
};

constexpr Glyph kFont[] = {
    {'0', {7, 5, 5, 5, 7}}, {'1', {2, 6, 2, 2, 7}}, {'2', {7, 1, 7, 4, 7}}, {'3', {7, 1, 7, 1, 7}},
    {'4', {5, 5, 7, 1, 1}}, {'5', {7, 4, 7, 1, 7}}, {'6', {7, 4, 7, 5, 7}}, {'7', {7, 1, 1, 1, 1}},
    {'8', {7, 5, 7, 5, 7}}, {'9', {7, 5, 7, 1, 7}}, {'.', {0, 0, 0, 0, 2}}, {'-', {0, 0, 7, 0, 0}},
    {'+', {0, 2, 7, 2, 0}}, {'e', {0, 7, 7, 4, 7}},
};

constexpr int kScale = 2;
constexpr int kLeft = 64, kRight = 16, kTop = 16, kBottom = 36;

class Canvas {
 public:
  explicit Canvas(const Chart& c) : img_(c.width, c.height, Rgb::Ones()) {}

  void dot(int x, int y, const Rgb& c) {
    if (x >= 0 && y >= 0 && x < img_.width() && y < img_.height()) img_.set(x, y, c);
  }

  void line(double x0, double y0, double x1, double y1, const Rgb& c, int thick = 1, int dash = 0) {
    const int steps = static_cast<int>(std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)))) + 1;
    for (int i = 0; i <= steps; ++i) {
      if (dash > 0 && (i / dash) % 2 == 1) continue;
      const double t = static_cast<double>(i) / steps;
      const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
      const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
      for (int dy = 0; dy < thick; ++dy)
        for (int dx = 0; dx < thick; ++dx) dot(x + dx, y + dy, c);
    }
  }

  void text(int x, int y, const std::string& s, const Rgb& c) {
    for (char ch : s) {
      for (const Glyph& g : kFont) {
        if (g.c != ch) continue;
        for (int r = 0; r < 5; ++r)
          for (int col = 0; col < 3; ++col)
            if (g.rows[r] & (4 >> col))
              for (int sy = 0; sy < kScale; ++sy)
                for (int sx = 0; sx < kScale; ++sx) dot(x + col * kScale + sx, y + r * kScale + sy, c);
      }
      x += 4 * kScale;
    }
  }

  ImageBuffer take() { return std::move(img_); }

 private:
  ImageBuffer img_;
};

Rgb srgb(int r, int g, int b) { return {srgb_to_linear(r / 255.0), srgb_to_linear(g / 255.0), srgb_to_linear(b / 255.0)}; }

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

Series palette(std::size_t i) {
  static constexpr int kColors[][3] = {{31, 119, 180}, {214, 39, 40}, {44, 160, 44},
                                       {255, 127, 14}, {148, 103, 189}, {23, 190, 207}};
  const auto& c = kColors[i % 6];
  Series s;
  s.r = c[0];
  s.g = c[1];
  s.b = c[2];
  return s;
}

ImageBuffer render(const Chart& chart) {
  auto tx = [&](double x) { return chart.log_x ? std::log10(x) : x; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const Series& s : chart.series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i]) || !std::isfinite(tx(s.x[i]))) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  if (!std::isnan(chart.y_min)) y0 = chart.y_min;
  if (!std::isnan(chart.y_max)) y1 = chart.y_max;
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  if (std::isnan(chart.y_min)) y0 -= pad;
  if (std::isnan(chart.y_max)) y1 += pad;

  const double pw = chart.width - kLeft - kRight;
  const double ph = chart.height - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  Canvas cv(chart);
  const Rgb grid = srgb(225, 225, 225), axis = srgb(40, 40, 40);
  for (int k = 0; k <= 4; ++k) {
    const double yv = y0 + (y1 - y0) * k / 4.0;
    const double yy = py(yv);
    cv.line(kLeft, yy, kLeft + pw, yy, grid);
    cv.text(4, static_cast<int>(yy) - 5, label(yv), axis);
    const double xt = x0 + (x1 - x0) * k / 4.0;
    const double xv = chart.log_x ? std::pow(10.0, xt) : xt;
    const double xx = kLeft + (xt - x0) / (x1 - x0) * pw;
    cv.line(xx, kTop, xx, kTop + ph, grid);
    const std::string s = label(xv);
    cv.text(static_cast<int>(xx) - static_cast<int>(s.size()) * 4, kTop + static_cast<int>(ph) + 8, s, axis);
  }
  cv.line(kLeft, kTop, kLeft, kTop + ph, axis);
  cv.line(kLeft, kTop + ph, kLeft + pw, kTop + ph, axis);

  for (double m : chart.markers) {
    if (!std::isfinite(tx(m))) continue;
    cv.line(px(m), kTop, px(m), kTop + ph, srgb(90, 90, 90), 1, 4);
  }

  for (const Series& s : chart.series) {
    const Rgb c = srgb(s.r, s.g, s.b);
    bool have = false;
    double lx = 0, ly = 0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i]) || !std::isfinite(tx(s.x[i]))) {
        have = false;
        continue;
      }
      const double x = px(s.x[i]);
      const double y = py(std::clamp(s.y[i], y0, y1));
      if (have) cv.line(lx, ly, x, y, c, 2);
      for (int d = -2; d <= 2; ++d) cv.line(x - 2, y + d, x + 2, y + d, c);
      lx = x;
      ly = y;
      have = true;
    }
  }
  return cv.take();
}

void write(const std::filesystem::path& path, const Chart& chart) { write_png(path, render(chart)); }

}  // namespace vxhaze::plot
