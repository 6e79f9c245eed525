#pragma once

// Minimal self-contained SVG polyline charts with a log10 y axis.

#include <string>
#include <vector>

namespace fpinn::harness {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  int width = 720;
  int height = 440;
  bool markers = false;  // small circles at each point, for sparse series
};

/// Points with y <= 0 or non-finite y are dropped (they break the polyline).
std::string render_svg(const Chart& chart);
void write_svg(const std::string& path, const Chart& chart);

std::string xml_escape(const std::string& s);

}  // namespace fpinn::harness
