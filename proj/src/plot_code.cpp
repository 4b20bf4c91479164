#include "geoforge/plot_code.hpp"

#include "geoforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace geoforge::schema {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const std::set<std::string> kTopLevelKeys{"points", "segments", "circles", "quantities", "annotations"};
const std::set<std::string> kAnnotationKeys{"right_angles", "length_of_line", "measure_of_angle"};

// Python tuples to JSON arrays, leaving string contents alone.
std::string normalize_tuples(std::string_view text) {
    std::string out(text);
    bool in_string = false;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const char c = out[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
        } else if (c == '"') {
            in_string = true;
        } else if (c == '(') {
            out[i] = '[';
        } else if (c == ')') {
            out[i] = ']';
        }
    }
    return out;
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where.empty() ? key : where + "." + key);
    return *it;
}

Label label_of(const json& v, const std::string& where) {
    if (!v.is_string() || v.get_ref<const std::string&>().empty())
        throw SchemaError(where + ": expected a point label");
    return v.get<std::string>();
}

template <std::size_t N>
std::array<Label, N> labels_of(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != N)
        throw SchemaError(where + ": expected " + std::to_string(N) + " point labels");
    std::array<Label, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = label_of(v[i], where);
    return out;
}

std::string value_literal(const json& v, SchemaMode mode, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (mode == SchemaMode::lenient && v.is_number()) return v.dump();
    throw SchemaError(where + ": expected a value string");
}

double number_of(const json& v, const std::string& where) {
    if (!v.is_number()) throw CoordError(where + ": not a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw CoordError(where + ": not finite");
    return d;
}

void check_label(const PlotCode& pc, const Label& l) {
    if (!pc.points.count(l)) throw DanglingLabel(l);
}

CircleSpec circle_of(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() < 3 || v.size() > 4) throw SchemaError(where + ": malformed circle");
    CircleSpec c;
    if (!v[0].is_string()) throw SchemaError(where + ": circle ID must be a string");
    c.id = v[0].get<std::string>();
    if (!is_circle_id(c.id)) throw SchemaError(where + ": circle ID '" + c.id + "' must look like C1");
    if (v.size() == 3) {
        c.points.push_back(label_of(v[1], where));
        if (v[2].is_number()) {
            c.form = CircleSpec::Form::center_radius;
            c.radius = number_of(v[2], where + ".radius");
            if (!(c.radius > 0)) throw DegenerateCircle(c.id + ": radius must be positive");
        } else {
            c.form = CircleSpec::Form::center_point;
            c.points.push_back(label_of(v[2], where));
        }
        return c;
    }
    c.points.push_back(label_of(v[1], where));
    c.points.push_back(label_of(v[2], where));
    if (v[3].is_string() && v[3].get<std::string>() == "diameter") {
        c.form = CircleSpec::Form::diameter;
    } else {
        c.form = CircleSpec::Form::three_points;
        c.points.push_back(label_of(v[3], where));
    }
    return c;
}

}  // namespace

bool is_circle_id(std::string_view s) {
    return s.size() >= 2 && s[0] == 'C' &&
           std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Segment canonical_segment(const Label& a, const Label& b) {
    return a < b ? Segment{a, b} : Segment{b, a};
}

PlotCode plotcode_from_json(const json& j, SchemaMode mode) {
    if (!j.is_object()) throw SchemaError("root: expected an object");
    if (mode == SchemaMode::strict)
        for (const auto& [key, _] : j.items())
            if (!kTopLevelKeys.count(key)) throw SchemaError("unknown key '" + key + "'");

    PlotCode pc;
    const json& points = require(j, "points", "");
    if (!points.is_object()) throw SchemaError("points: expected an object");
    for (const auto& [label, xy] : points.items()) {
        if (label.empty()) throw SchemaError("points: empty label");
        if (is_circle_id(label)) throw SchemaError("points: label '" + label + "' collides with circle IDs");
        if (!xy.is_array() || xy.size() != 2) throw CoordError(label + ": expected two coordinates");
        pc.points[label] = Point2{number_of(xy[0], label + ".x"), number_of(xy[1], label + ".y")};
    }

    const json& segments = require(j, "segments", "");
    if (!segments.is_array()) throw SchemaError("segments: expected a list");
    for (const auto& s : segments) {
        auto ends = labels_of<2>(s, "segments");
        check_label(pc, ends[0]);
        check_label(pc, ends[1]);
        if (ends[0] == ends[1]) throw SchemaError("segments: zero-length segment " + ends[0] + ends[1]);
        pc.segments.emplace_back(ends[0], ends[1]);
    }

    const json& circles = require(j, "circles", "");
    if (!circles.is_array()) throw SchemaError("circles: expected a list");
    std::set<std::string> ids;
    for (const auto& c : circles) {
        CircleSpec spec = circle_of(c, "circles");
        if (!ids.insert(spec.id).second) throw DuplicateCircleId(spec.id);
        for (const auto& l : spec.points) check_label(pc, l);
        pc.circles.push_back(std::move(spec));
    }

    const json& quantities = require(j, "quantities", "");
    if (!quantities.is_array()) throw SchemaError("quantities: expected a list");
    for (const auto& q : quantities) {
        if (!q.is_string()) throw SchemaError("quantities: expected strings");
        pc.quantities.push_back(q.get<std::string>());
    }

    const json& ann = require(j, "annotations", "");
    if (!ann.is_object()) throw SchemaError("annotations: expected an object");
    for (const auto& [key, _] : ann.items())
        if (mode == SchemaMode::strict && !kAnnotationKeys.count(key))
            throw SchemaError("annotations: unknown key '" + key + "'");
    auto list = [&](const std::string& key) -> const json* {
        auto it = ann.find(key);
        if (it == ann.end()) {
            if (mode == SchemaMode::strict) throw SchemaError("annotations." + key);
            return nullptr;
        }
        if (!it->is_array()) throw SchemaError("annotations." + key + ": expected a list");
        return &*it;
    };
    if (const json* ra = list("right_angles")) {
        for (const auto& t : *ra) {
            auto tri = labels_of<3>(t, "right_angles");
            for (const auto& l : tri) check_label(pc, l);
            pc.annotations.right_angles.push_back(tri);
        }
    }
    if (const json* ll = list("length_of_line")) {
        for (const auto& e : *ll) {
            if (!e.is_array() || e.size() != 2) throw SchemaError("length_of_line: expected [[A, B], value]");
            auto seg = labels_of<2>(e[0], "length_of_line");
            for (const auto& l : seg) check_label(pc, l);
            pc.annotations.length_of_line.emplace_back(seg, value_literal(e[1], mode, "length_of_line"));
        }
    }
    if (const json* ma = list("measure_of_angle")) {
        for (const auto& e : *ma) {
            if (!e.is_array() || e.size() != 2)
                throw SchemaError("measure_of_angle: expected [[A, B, C], value]");
            auto tri = labels_of<3>(e[0], "measure_of_angle");
            for (const auto& l : tri) check_label(pc, l);
            pc.annotations.measure_of_angle.emplace_back(tri, value_literal(e[1], mode, "measure_of_angle"));
        }
    }
    return pc;
}

PlotCode parse_plotcode(std::string_view bytes, SchemaMode mode) {
    json j = json::parse(normalize_tuples(bytes), nullptr, false);
    if (j.is_discarded()) throw SchemaError("root: not valid JSON");
    return plotcode_from_json(j, mode);
}

ordered_json plotcode_to_json(const PlotCode& pc) {
    ordered_json out = ordered_json::object();
    ordered_json points = ordered_json::object();
    for (const auto& [label, p] : pc.points) points[label] = ordered_json::array({p.x, p.y});
    out["points"] = std::move(points);

    std::set<Segment> segs;
    for (const auto& [a, b] : pc.segments) segs.insert(canonical_segment(a, b));
    ordered_json segments = ordered_json::array();
    for (const auto& [a, b] : segs) segments.push_back(ordered_json::array({a, b}));
    out["segments"] = std::move(segments);

    ordered_json circles = ordered_json::array();
    for (const auto& c : pc.circles) {
        ordered_json e = ordered_json::array({c.id});
        for (const auto& l : c.points) e.push_back(l);
        if (c.form == CircleSpec::Form::center_radius) e.push_back(c.radius);
        if (c.form == CircleSpec::Form::diameter) e.push_back("diameter");
        circles.push_back(std::move(e));
    }
    out["circles"] = std::move(circles);
    out["quantities"] = pc.quantities;

    ordered_json ann = ordered_json::object();
    ann["right_angles"] = ordered_json::array();
    for (const auto& t : pc.annotations.right_angles) ann["right_angles"].push_back(t);
    ann["length_of_line"] = ordered_json::array();
    for (const auto& [seg, v] : pc.annotations.length_of_line)
        ann["length_of_line"].push_back(ordered_json::array({ordered_json(seg), v}));
    ann["measure_of_angle"] = ordered_json::array();
    for (const auto& [tri, v] : pc.annotations.measure_of_angle)
        ann["measure_of_angle"].push_back(ordered_json::array({ordered_json(tri), v}));
    out["annotations"] = std::move(ann);
    return out;
}

std::string canonical_serialize(const PlotCode& pc) { return plotcode_to_json(pc).dump(); }

bool structurally_equal(const PlotCode& a, const PlotCode& b) {
    auto segs = [](const PlotCode& pc) {
        std::set<Segment> s;
        for (const auto& [x, y] : pc.segments) s.insert(canonical_segment(x, y));
        return s;
    };
    return a.points == b.points && segs(a) == segs(b) && a.circles == b.circles &&
           a.annotations == b.annotations && a.quantities == b.quantities;
}

Circle2 resolve_circle(const CircleSpec& spec, const std::map<Label, Point2>& points) {
    auto at = [&](const Label& l) {
        auto it = points.find(l);
        if (it == points.end()) throw DanglingLabel(l);
        return it->second;
    };
    Circle2 c;
    switch (spec.form) {
    case CircleSpec::Form::center_radius:
        c = {at(spec.points.at(0)), spec.radius};
        break;
    case CircleSpec::Form::center_point:
        c = {at(spec.points.at(0)), distance(at(spec.points.at(0)), at(spec.points.at(1)))};
        break;
    case CircleSpec::Form::diameter: {
        const Point2 a = at(spec.points.at(0));
        const Point2 b = at(spec.points.at(1));
        c = {midpoint(a, b), distance(a, b) / 2.0};
        break;
    }
    case CircleSpec::Form::three_points: {
        auto cc = circumcircle(at(spec.points.at(0)), at(spec.points.at(1)), at(spec.points.at(2)));
        if (!cc) throw DegenerateCircle(spec.id + ": the three points are collinear");
        c = *cc;
        break;
    }
    }
    if (!(c.radius > 0) || !std::isfinite(c.radius)) throw DegenerateCircle(spec.id + ": zero radius");
    return c;
}

std::map<std::string, Circle2> resolve_circles(const PlotCode& pc) {
    std::map<std::string, Circle2> out;
    for (const auto& c : pc.circles) out[c.id] = resolve_circle(c, pc.points);
    return out;
}

PlotCode simplify_for_training(const PlotCode& pc) {
    PlotCode out = pc;
    int next_synth = 1;
    for (auto& c : out.circles) {
        const Circle2 resolved = resolve_circle(c, pc.points);
        Label center;
        if (c.form == CircleSpec::Form::center_radius || c.form == CircleSpec::Form::center_point) {
            center = c.points.front();
        } else {
            const double tol = 1e-9 * std::max(1.0, resolved.radius);
            for (const auto& [label, p] : out.points)
                if (distance(p, resolved.center) <= tol) {
                    center = label;
                    break;
                }
            if (center.empty()) {
                do center = "O" + std::to_string(next_synth++);
                while (out.points.count(center));
                out.points[center] = resolved.center;
            }
        }
        const double r = std::floor(resolved.radius);
        if (r < 1.0) throw DegenerateCircle(c.id + ": radius floors to 0");
        c.form = CircleSpec::Form::center_radius;
        c.points = {center};
        c.radius = r;
    }
    return out;
}

}  // namespace geoforge::schema
