#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hybridsp::svg {

/// A data series drawn as one <polyline>.
struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

enum class MarkerShape { Circle, Cross };

struct Marker {
    double x = 0.0;
    double y = 0.0;
    MarkerShape shape = MarkerShape::Circle;
    std::string color = "black";
};

/// Dashed horizontal (y = value) or vertical (x = value) reference line.
struct RefLine {
    bool horizontal = true;
    double value = 0.0;
    std::string color = "gray";
};

struct Plot {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
    std::vector<Marker> markers;
    std::vector<RefLine> ref_lines;
    bool equal_aspect = false;
};

/// Standalone SVG document. Series longer than `max_points` are decimated
/// with a uniform stride that keeps both end points.
std::string render(const Plot& plot, int width = 800, int height = 600, std::size_t max_points = 2000);

/// Tableau-like palette, cycled.
std::string palette(std::size_t i);

}  // namespace hybridsp::svg
