#pragma once

#include <string>
#include <vector>

namespace co2bench {

// Minimal dependency-free line plots for eyeballing results. Output is
// deterministic for identical inputs.

struct PlotSeries {
    std::string label;
    std::string color; // SVG color name or #rrggbb
    std::vector<double> values;
};

// Writes a two-panel SVG (top/bottom) sharing one x axis of sample indices.
// Each panel autoscales to its own series and draws a light grid plus a
// legend. Throws FormatError when the file cannot be written.
void write_day_plot(const std::string& path, const std::string& title,
                    const std::vector<PlotSeries>& top, const std::vector<PlotSeries>& bottom);

} // namespace co2bench
