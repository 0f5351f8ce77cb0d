#pragma once

#include <string>
#include <vector>

namespace kswave::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

std::string line_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

struct StripMark {
  double x;
  std::string category;
};

/// One row of markers along x, coloured by category, with a legend.
std::string strip_plot(const std::string& title, const std::string& x_label, const std::vector<StripMark>& marks);

/// Cells coloured from white (0) to red (>= scale); NaN cells are grey.
std::string heatmap(const std::string& title, const std::vector<std::string>& rows,
                    const std::vector<std::string>& cols, const std::vector<std::vector<double>>& values,
                    double scale);

}  // namespace kswave::svg
