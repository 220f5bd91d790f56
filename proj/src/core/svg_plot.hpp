#pragma once

#include <string>
#include <vector>

namespace advdrop {

// Minimal static SVG renderers for the analysis bundle.

void svg_bar_chart(const std::string& path, const std::string& title,
                   const std::vector<std::string>& labels,
                   const std::vector<double>& values,
                   const std::string& y_label);

// Points connected in order (a trajectory), plus markers.
void svg_trajectory(const std::string& path, const std::string& title,
                    const std::vector<double>& xs,
                    const std::vector<double>& ys, const std::string& x_label,
                    const std::string& y_label);

}  // namespace advdrop
