#pragma once

#include "geoforge/plot_code.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geoforge::render {

struct RenderStyle {
    int canvas_px = 512;
    double margin = 0.1;  // fraction of the canvas on each side
    double segment_width = 2.0;
    double circle_width = 1.5;
    double font_size = 16.0;
    double point_radius = 3.0;
    double right_angle_size = 10.0;
    double label_offset = 14.0;
    double angle_arc_radius = 20.0;

    // quality gates
    double max_label_overlap = 0.25;  // intersection over the smaller box
    double min_separation = 0.02;     // fraction of the diagram diagonal
    double min_height_ratio = 0.02;   // triangle height over its longest side

    /// Throws ConfigError.
    void validate() const;
};

/// Maps mathematical coordinates (y up) to canvas pixels (y down).
struct Viewport {
    double scale = 1.0;
    double min_x = 0.0;
    double max_y = 0.0;
    double offset_x = 0.0;
    double offset_y = 0.0;

    Point2 to_screen(Point2 p) const { return {offset_x + (p.x - min_x) * scale, offset_y + (max_y - p.y) * scale}; }
};

/// Bounding box of points and circle extents, fitted inside the margins and
/// centered. Throws EmptyScene.
Viewport fit_viewport(const schema::PlotCode& pc, const std::map<std::string, Circle2>& circles,
                      const RenderStyle& style);

struct LabelBox {
    std::string label;
    Point2 anchor;  // text center in screen space
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

/// Point-label boxes in screen space, one per point, in label order.
std::vector<LabelBox> point_label_boxes(const schema::PlotCode& pc, const Viewport& vp, const RenderStyle& style);

/// Throws EmptyScene, DegenerateCircle, DanglingLabel.
std::string render_svg(const schema::PlotCode& pc, const RenderStyle& style = {});

/// True when PNG export is compiled in.
bool png_supported();

/// Rasterizes the same primitives as render_svg. Throws ConfigError when PNG
/// export is not compiled in or the file cannot be written.
void render_png(const schema::PlotCode& pc, const std::string& path, const RenderStyle& style = {});

struct QualityReport {
    std::vector<std::pair<std::string, std::string>> overlapping_labels;
    double min_separation = 0.0;             // fraction of the diagonal
    std::optional<double> min_height_ratio;  // absent when no triangle is drawn
    bool pass = true;
    std::vector<std::string> reasons;
};

QualityReport quality_check(const schema::PlotCode& pc, const RenderStyle& style = {});

}  // namespace geoforge::render
