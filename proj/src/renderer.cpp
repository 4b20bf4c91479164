#include "geoforge/renderer.hpp"

#include "geoforge/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#ifdef GEOFORGE_HAVE_OPENCV
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#endif

namespace geoforge::render {

namespace {

using schema::Label;
using schema::PlotCode;

constexpr double kCharWidth = 0.6;  // glyph advance as a fraction of font size

std::string fmt(double v) {
    if (std::abs(v) < 0.005) v = 0.0;
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

Point2 lookup(const PlotCode& pc, const Label& l) {
    auto it = pc.points.find(l);
    if (it == pc.points.end()) throw DanglingLabel(l);
    return it->second;
}

Point2 unit(Point2 v) {
    const double n = norm(v);
    return n < 1e-12 ? Point2{0, 0} : v * (1.0 / n);
}

std::set<schema::Segment> segment_set(const PlotCode& pc) {
    std::set<schema::Segment> out;
    for (const auto& [a, b] : pc.segments)
        if (a != b) out.insert(schema::canonical_segment(a, b));
    return out;
}

struct Bounds {
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    double max_x = -std::numeric_limits<double>::infinity();
    double max_y = -std::numeric_limits<double>::infinity();

    void add(Point2 p, double r = 0.0) {
        min_x = std::min(min_x, p.x - r);
        min_y = std::min(min_y, p.y - r);
        max_x = std::max(max_x, p.x + r);
        max_y = std::max(max_y, p.y + r);
    }
    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    double diagonal() const { return std::hypot(width(), height()); }
};

Bounds scene_bounds(const PlotCode& pc, const std::map<std::string, Circle2>& circles) {
    Bounds b;
    for (const auto& [_, p] : pc.points) b.add(p);
    for (const auto& [_, c] : circles) b.add(c.center, c.radius);
    return b;
}

// Screen-space primitives shared by the SVG and raster back ends.
struct Arc {
    Point2 center;
    double radius;
    Point2 from, to;
    bool positive_sweep;
};

struct Text {
    std::string cls;
    std::string text;
    Point2 at;
};

struct Drawing {
    std::vector<std::pair<Point2, Point2>> lines;
    std::vector<std::pair<Point2, double>> circles;
    std::vector<std::array<Point2, 3>> right_angles;
    std::vector<Arc> arcs;
    std::vector<Point2> dots;
    std::vector<Text> texts;
};

Point2 label_direction(const PlotCode& pc, const Label& label, const std::set<schema::Segment>& segs) {
    const Point2 p = pc.points.at(label);
    Point2 sum{0, 0};
    int n = 0;
    for (const auto& [a, b] : segs) {
        if (a == label) sum = sum + lookup(pc, b), ++n;
        if (b == label) sum = sum + lookup(pc, a), ++n;
    }
    Point2 dir{0, 0};
    if (n > 0) dir = unit(p - sum * (1.0 / n));
    if (norm(dir) == 0.0) {
        Point2 centroid{0, 0};
        for (const auto& [_, q] : pc.points) centroid = centroid + q;
        centroid = centroid * (1.0 / static_cast<double>(pc.points.size()));
        dir = unit(p - centroid);
    }
    if (norm(dir) == 0.0) dir = {1, 0};
    return {dir.x, -dir.y};  // screen space
}

std::vector<LabelBox> label_boxes(const PlotCode& pc, const Viewport& vp, const RenderStyle& style,
                                  const std::set<schema::Segment>& segs) {
    std::vector<LabelBox> out;
    for (const auto& [label, p] : pc.points) {
        const Point2 at = vp.to_screen(p) + label_direction(pc, label, segs) * style.label_offset;
        const double half_w = 0.5 * kCharWidth * style.font_size * static_cast<double>(label.size());
        const double half_h = 0.5 * style.font_size;
        out.push_back({label, at, at.x - half_w, at.y - half_h, at.x + half_w, at.y + half_h});
    }
    return out;
}

Drawing build_drawing(const PlotCode& pc, const RenderStyle& style, Viewport* vp_out = nullptr) {
    if (pc.points.empty()) throw EmptyScene("plot code has no points");
    const auto circles = schema::resolve_circles(pc);
    const Viewport vp = fit_viewport(pc, circles, style);
    if (vp_out) *vp_out = vp;
    const auto segs = segment_set(pc);

    Point2 screen_centroid{0, 0};
    for (const auto& [_, p] : pc.points) screen_centroid = screen_centroid + vp.to_screen(p);
    screen_centroid = screen_centroid * (1.0 / static_cast<double>(pc.points.size()));

    Drawing d;
    for (const auto& [a, b] : segs) d.lines.emplace_back(vp.to_screen(lookup(pc, a)), vp.to_screen(lookup(pc, b)));
    for (const auto& [_, c] : circles) d.circles.emplace_back(vp.to_screen(c.center), c.radius * vp.scale);

    for (const auto& t : pc.annotations.right_angles) {
        const Point2 b = vp.to_screen(lookup(pc, t[1]));
        const Point2 u = unit(vp.to_screen(lookup(pc, t[0])) - b) * style.right_angle_size;
        const Point2 v = unit(vp.to_screen(lookup(pc, t[2])) - b) * style.right_angle_size;
        d.right_angles.push_back({b + u, b + u + v, b + v});
    }
    for (const auto& [seg, literal] : pc.annotations.length_of_line) {
        const Point2 a = vp.to_screen(lookup(pc, seg[0]));
        const Point2 b = vp.to_screen(lookup(pc, seg[1]));
        const Point2 mid = midpoint(a, b);
        Point2 normal = unit(Point2{-(b - a).y, (b - a).x});
        if (dot(normal, mid - screen_centroid) < 0) normal = normal * -1.0;
        d.texts.push_back({"length-label", literal, mid + normal * (0.8 * style.font_size)});
    }
    for (const auto& [tri, literal] : pc.annotations.measure_of_angle) {
        const Point2 b = vp.to_screen(lookup(pc, tri[1]));
        const Point2 ua = unit(vp.to_screen(lookup(pc, tri[0])) - b);
        const Point2 uc = unit(vp.to_screen(lookup(pc, tri[2])) - b);
        const double r = style.angle_arc_radius;
        d.arcs.push_back({b, r, b + ua * r, b + uc * r, cross(ua, uc) > 0});
        Point2 bis = unit(ua + uc);
        if (norm(bis) == 0.0) bis = {ua.y, -ua.x};
        d.texts.push_back({"angle-label", literal + "°", b + bis * (r + 0.8 * style.font_size)});
    }
    for (const auto& [_, p] : pc.points) d.dots.push_back(vp.to_screen(p));
    for (const auto& box : label_boxes(pc, vp, style, segs)) d.texts.push_back({"point-label", box.label, box.anchor});
    return d;
}

}  // namespace

void RenderStyle::validate() const {
    const bool positive = canvas_px > 0 && segment_width > 0 && circle_width > 0 && font_size > 0 &&
                          point_radius > 0 && right_angle_size > 0 && label_offset > 0 && angle_arc_radius > 0 &&
                          max_label_overlap > 0 && min_separation > 0 && min_height_ratio > 0;
    if (!positive) throw ConfigError("render style values must be positive");
    if (!(margin > 0 && margin < 0.5)) throw ConfigError("margin must lie in (0, 0.5)");
}

Viewport fit_viewport(const PlotCode& pc, const std::map<std::string, Circle2>& circles, const RenderStyle& style) {
    if (pc.points.empty()) throw EmptyScene("plot code has no points");
    const Bounds b = scene_bounds(pc, circles);
    const double usable = style.canvas_px * (1.0 - 2.0 * style.margin);
    const double extent = std::max(b.width(), b.height());
    Viewport vp;
    vp.scale = extent > 0 ? usable / extent : 1.0;
    vp.min_x = b.min_x;
    vp.max_y = b.max_y;
    vp.offset_x = style.canvas_px * style.margin + 0.5 * (usable - b.width() * vp.scale);
    vp.offset_y = style.canvas_px * style.margin + 0.5 * (usable - b.height() * vp.scale);
    return vp;
}

std::vector<LabelBox> point_label_boxes(const PlotCode& pc, const Viewport& vp, const RenderStyle& style) {
    return label_boxes(pc, vp, style, segment_set(pc));
}

std::string render_svg(const PlotCode& pc, const RenderStyle& style) {
    style.validate();
    const Drawing d = build_drawing(pc, style);
    const std::string size = std::to_string(style.canvas_px);
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + size + "\" height=\"" + size +
         "\" viewBox=\"0 0 " + size + " " + size + "\">\n";
    s += "<rect width=\"" + size + "\" height=\"" + size + "\" fill=\"white\"/>\n";
    s += "<g stroke=\"black\" fill=\"none\" stroke-linecap=\"round\">\n";
    for (const auto& [a, b] : d.lines)
        s += "<line class=\"segment\" x1=\"" + fmt(a.x) + "\" y1=\"" + fmt(a.y) + "\" x2=\"" + fmt(b.x) + "\" y2=\"" +
             fmt(b.y) + "\" stroke-width=\"" + fmt(style.segment_width) + "\"/>\n";
    for (const auto& [c, r] : d.circles)
        s += "<circle class=\"circle\" cx=\"" + fmt(c.x) + "\" cy=\"" + fmt(c.y) + "\" r=\"" + fmt(r) +
             "\" stroke-width=\"" + fmt(style.circle_width) + "\"/>\n";
    for (const auto& m : d.right_angles)
        s += "<path class=\"right-angle\" d=\"M " + fmt(m[0].x) + " " + fmt(m[0].y) + " L " + fmt(m[1].x) + " " +
             fmt(m[1].y) + " L " + fmt(m[2].x) + " " + fmt(m[2].y) + "\" stroke-width=\"1.00\"/>\n";
    for (const auto& a : d.arcs)
        s += "<path class=\"angle-arc\" d=\"M " + fmt(a.from.x) + " " + fmt(a.from.y) + " A " + fmt(a.radius) + " " +
             fmt(a.radius) + " 0 0 " + (a.positive_sweep ? "1" : "0") + " " + fmt(a.to.x) + " " + fmt(a.to.y) +
             "\" stroke-width=\"1.00\"/>\n";
    s += "</g>\n<g fill=\"black\">\n";
    for (const auto& p : d.dots)
        s += "<circle class=\"point\" cx=\"" + fmt(p.x) + "\" cy=\"" + fmt(p.y) + "\" r=\"" + fmt(style.point_radius) +
             "\"/>\n";
    s += "</g>\n<g font-family=\"sans-serif\" font-size=\"" + fmt(style.font_size) +
         "\" text-anchor=\"middle\" dominant-baseline=\"central\">\n";
    for (const auto& t : d.texts)
        s += "<text class=\"" + t.cls + "\" x=\"" + fmt(t.at.x) + "\" y=\"" + fmt(t.at.y) + "\">" +
             xml_escape(t.text) + "</text>\n";
    s += "</g>\n</svg>\n";
    return s;
}

bool png_supported() {
#ifdef GEOFORGE_HAVE_OPENCV
    return true;
#else
    return false;
#endif
}

void render_png(const PlotCode& pc, const std::string& path, const RenderStyle& style) {
#ifdef GEOFORGE_HAVE_OPENCV
    style.validate();
    const Drawing d = build_drawing(pc, style);
    cv::Mat img(style.canvas_px, style.canvas_px, CV_8UC3, cv::Scalar(255, 255, 255));
    const cv::Scalar ink(0, 0, 0);
    auto pt = [](Point2 p) { return cv::Point(static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))); };
    const int seg_w = std::max(1, static_cast<int>(std::lround(style.segment_width)));
    const int circ_w = std::max(1, static_cast<int>(std::lround(style.circle_width)));
    for (const auto& [a, b] : d.lines) cv::line(img, pt(a), pt(b), ink, seg_w, cv::LINE_AA);
    for (const auto& [c, r] : d.circles)
        cv::circle(img, pt(c), static_cast<int>(std::lround(r)), ink, circ_w, cv::LINE_AA);
    for (const auto& m : d.right_angles) {
        cv::line(img, pt(m[0]), pt(m[1]), ink, 1, cv::LINE_AA);
        cv::line(img, pt(m[1]), pt(m[2]), ink, 1, cv::LINE_AA);
    }
    for (const auto& a : d.arcs) {
        const double start = rad_to_deg(std::atan2(a.from.y - a.center.y, a.from.x - a.center.x));
        double sweep = rad_to_deg(vertex_angle(a.from, a.center, a.to));
        if (!a.positive_sweep) sweep = -sweep;
        const int r = static_cast<int>(std::lround(a.radius));
        cv::ellipse(img, pt(a.center), cv::Size(r, r), 0.0, start, start + sweep, ink, 1, cv::LINE_AA);
    }
    for (const auto& p : d.dots)
        cv::circle(img, pt(p), static_cast<int>(std::lround(style.point_radius)), ink, cv::FILLED, cv::LINE_AA);
    const double font_scale = style.font_size / 30.0;
    for (const auto& t : d.texts) {
        std::string text = t.text;
        if (t.cls == "angle-label") text = text.substr(0, text.size() - 2) + " deg";  // Hershey fonts lack the degree sign
        int baseline = 0;
        const cv::Size sz = cv::getTextSize(text, cv::FONT_HERSHEY_SIMPLEX, font_scale, 1, &baseline);
        const cv::Point origin(static_cast<int>(std::lround(t.at.x - sz.width / 2.0)),
                               static_cast<int>(std::lround(t.at.y + sz.height / 2.0)));
        cv::putText(img, text, origin, cv::FONT_HERSHEY_SIMPLEX, font_scale, ink, 1, cv::LINE_AA);
    }
    if (!cv::imwrite(path, img)) throw ConfigError("cannot write " + path);
#else
    (void)pc;
    (void)path;
    (void)style;
    throw ConfigError("PNG export requires a build with OpenCV");
#endif
}

QualityReport quality_check(const PlotCode& pc, const RenderStyle& style) {
    QualityReport q;
    if (pc.points.empty()) {
        q.pass = false;
        q.reasons.push_back("no points");
        return q;
    }
    std::map<std::string, Circle2> circles;
    try {
        circles = schema::resolve_circles(pc);
    } catch (const Error&) {
        // unresolvable circles are the verifier's concern; lay out points only
    }
    const Viewport vp = fit_viewport(pc, circles, style);
    const auto segs = segment_set(pc);

    const auto boxes = label_boxes(pc, vp, style, segs);
    for (std::size_t i = 0; i < boxes.size(); ++i)
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            const auto& a = boxes[i];
            const auto& b = boxes[j];
            const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
            const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
            if (w <= 0 || h <= 0) continue;
            const double smaller = std::min((a.x1 - a.x0) * (a.y1 - a.y0), (b.x1 - b.x0) * (b.y1 - b.y0));
            if (w * h / smaller > style.max_label_overlap) {
                q.overlapping_labels.emplace_back(a.label, b.label);
                q.reasons.push_back("labels " + a.label + " and " + b.label + " overlap");
            }
        }

    const double diag = scene_bounds(pc, circles).diagonal();
    q.min_separation = 1.0;
    if (diag > 0) {
        for (auto i = pc.points.begin(); i != pc.points.end(); ++i)
            for (auto j = std::next(i); j != pc.points.end(); ++j)
                q.min_separation = std::min(q.min_separation, distance(i->second, j->second) / diag);
    }
    if (pc.points.size() > 1 && q.min_separation < style.min_separation)
        q.reasons.push_back("points closer than " + fmt(100.0 * style.min_separation) + "% of the diagonal");

    std::vector<Label> labels;
    for (const auto& [l, _] : pc.points) labels.push_back(l);
    auto joined = [&](const Label& a, const Label& b) { return segs.count(schema::canonical_segment(a, b)) > 0; };
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j) {
            if (!joined(labels[i], labels[j])) continue;
            for (std::size_t k = j + 1; k < labels.size(); ++k) {
                if (!joined(labels[i], labels[k]) || !joined(labels[j], labels[k])) continue;
                const Point2 a = pc.points.at(labels[i]), b = pc.points.at(labels[j]), c = pc.points.at(labels[k]);
                const double base = std::max({distance(a, b), distance(b, c), distance(a, c)});
                const double ratio = base > 0 ? std::abs(orient(a, b, c)) / (base * base) : 0.0;
                if (!q.min_height_ratio || ratio < *q.min_height_ratio) q.min_height_ratio = ratio;
                if (ratio < style.min_height_ratio)
                    q.reasons.push_back("triangle " + labels[i] + labels[j] + labels[k] + " is nearly flat");
            }
        }
    q.pass = q.reasons.empty();
    return q;
}

}  // namespace geoforge::render
