#pragma once

#include <string>
#include <vector>

namespace hysta {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color; ///< empty = pick from the default palette
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

/// Renders stacked line panels into a standalone SVG file. Long series are
/// decimated to at most max_points per series.
void write_svg_panels(const std::vector<Panel>& panels, const std::string& path,
                      int width = 960, int panel_height = 280,
                      std::size_t max_points = 4000);

} // namespace hysta
