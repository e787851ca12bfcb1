#pragma once
#include <string>
#include <vector>

namespace pdde {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line plot: axes with tick labels, one polyline per
/// series, legend in the top-right corner. Non-finite points break the
/// polyline; long series are thinned to keep files small.
std::string render_line_plot(const std::string& title,
                             const std::vector<PlotSeries>& series,
                             const std::string& x_label = "t",
                             const std::string& y_label = "",
                             int width = 900, int height = 520);

}  // namespace pdde
