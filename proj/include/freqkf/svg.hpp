#pragma once

#include <string>
#include <vector>

namespace freqkf::svg {

struct Series {
  std::string name;
  std::string color = "#1f77b4";
  bool dashed = false;
  std::vector<double> xs;
  std::vector<double> ys;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 720;
  int height = 420;
  std::vector<Series> series;
};

// Deterministic SVG line chart with axes, ticks and a legend. Throws
// InvalidConfig on empty or mismatched series, or non-positive x on a log axis.
std::string render(const Chart& chart);

}  // namespace freqkf::svg
