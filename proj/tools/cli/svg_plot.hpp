#pragma once

#include <optional>
#include <string>
#include <vector>

namespace twinbeam::cli {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    // Dashed horizontal line, e.g. the 0 dB shot-noise level.
    std::optional<double> reference_y;
};

// Minimal static SVG line plot: frame, tick labels, one polyline per series.
std::string render_svg(const PlotSpec& spec);

}  // namespace twinbeam::cli
