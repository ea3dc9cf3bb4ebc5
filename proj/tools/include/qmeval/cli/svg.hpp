#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qmeval::cli {

// Minimal static SVG charts. Each render function returns nullopt when there
// is nothing finite to draw.

struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<std::optional<double>> y;  // gaps break the line
  bool dashed = false;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<LineSeries> series;
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> groups;                      // x-axis categories
  std::vector<std::string> series;                      // one bar per series within a group
  std::vector<std::vector<std::optional<double>>> values;  // [group][series]
};

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  bool marked = false;  // drawn as a filled circle; otherwise as a cross
};

struct ScatterPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::string marked_name;
  std::string unmarked_name;
  std::vector<ScatterPoint> points;
};

std::optional<std::string> render(const LineChart& chart);
std::optional<std::string> render(const BarChart& chart);
std::optional<std::string> render(const ScatterPlot& plot);

}  // namespace qmeval::cli
