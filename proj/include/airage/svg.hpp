#pragma once

#include <string>
#include <vector>

namespace airage {

/// One polyline of a chart.
struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Minimal static line chart: axes with tick labels, one polyline per
/// series, legend. Throws data_error on empty/mismatched series or an
/// unwritable path.
void write_line_chart(const std::vector<SvgSeries>& series, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::string& path);

} // namespace airage
