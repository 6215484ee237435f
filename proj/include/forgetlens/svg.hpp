#pragma once

#include <limits>
#include <string>
#include <vector>

#include "forgetlens/analytics.hpp"

namespace forgetlens {
namespace svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> stderr_band;  // optional, same length as y
    std::string color = "#1f77b4";
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    double vertical_marker = std::numeric_limits<double>::quiet_NaN();
    int width = 640;
    int height = 420;
};

// Bar chart of integer bins with a visually separated never-learnt bar.
void render_histogram(const analytics::Histogram& hist, const PlotOptions& options,
                      const std::string& path);

// Overlaid line plot with optional shaded stderr bands and an optional
// vertical marker line.
void render_lines(const std::vector<Series>& series, const PlotOptions& options,
                  const std::string& path);

}  // namespace svg
}  // namespace forgetlens
