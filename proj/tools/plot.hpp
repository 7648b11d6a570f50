#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "vxhaze/image.hpp"

namespace vxhaze::plot {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
  // sRGB 0-255.
  int r = 0, g = 0, b = 0;
};

struct Chart {
  int width = 640;
  int height = 400;
  bool log_x = false;
  std::vector<Series> series;
  // Dashed vertical markers at these x positions.
  std::vector<double> markers;
  // Axis range; NaN means fit to data.
  double y_min = std::numeric_limits<double>::quiet_NaN();
  double y_max = std::numeric_limits<double>::quiet_NaN();
};

// Rasterises the chart (axes, tick values, polylines with point markers).
// Non-finite samples break the line.
ImageBuffer render(const Chart& chart);
void write(const std::filesystem::path& path, const Chart& chart);

// Distinct line colours for series i.
Series palette(std::size_t i);

}  // namespace vxhaze::plot
