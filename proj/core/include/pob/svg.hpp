#pragma once

#include <span>
#include <string>
#include <vector>

namespace pob::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
  bool dashed = false;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  double y_min = 0.0;
  double y_max = 1.0;
  int width = 480;
  int height = 320;
};

/// One bar per label. Values are clamped to [y_min, y_max].
std::string bar_chart(const Chart& chart, std::span<const std::string> labels,
                      std::span<const double> values, const std::string& color = "#1f77b4");

/// Polylines over a shared x range taken from the data.
std::string line_chart(const Chart& chart, std::span<const Series> series);

/// Two panels side by side in one document.
std::string side_by_side(const std::string& left, const std::string& right, int width,
                         int height);

}  // namespace pob::svg
