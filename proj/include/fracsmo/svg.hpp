#pragma once

#include <span>
#include <string>
#include <vector>

namespace fracsmo {

struct PlotSeries {
  std::string label;
  std::string color;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string x_label = "t [s]";
  std::string y_label;
  std::vector<double> x;
  std::vector<PlotSeries> series;
};

/// Minimal SVG line chart: frame, ticks, labels, legend and one polyline per
/// series. Long series are reduced to per-pixel min/max pairs so chattering
/// envelopes survive.
std::string render_svg(const Plot& plot);

void write_svg(const std::string& path, const Plot& plot);

}  // namespace fracsmo
