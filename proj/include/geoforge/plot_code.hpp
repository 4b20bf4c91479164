#pragma once

#include "geoforge/geometry.hpp"

#include <json.hpp>

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace geoforge::schema {

using Label = std::string;

struct CircleSpec {
    enum class Form { center_radius, center_point, diameter, three_points };

    std::string id;  // C<digits>
    Form form = Form::center_radius;
    std::vector<Label> points;  // O | O P | A B | A B C
    double radius = 0.0;        // center_radius only

    bool operator==(const CircleSpec&) const = default;
};

using Segment = std::pair<Label, Label>;
using Triple = std::array<Label, 3>;

struct Annotations {
    std::vector<Triple> right_angles;
    std::vector<std::pair<std::array<Label, 2>, std::string>> length_of_line;
    std::vector<std::pair<Triple, std::string>> measure_of_angle;

    bool empty() const {
        return right_angles.empty() && length_of_line.empty() && measure_of_angle.empty();
    }
    bool operator==(const Annotations&) const = default;
};

struct PlotCode {
    std::map<Label, Point2> points;
    std::vector<Segment> segments;  // as given; compare with structurally_equal
    std::vector<CircleSpec> circles;
    Annotations annotations;
    std::vector<std::string> quantities;
};

enum class SchemaMode {
    strict,   // unknown keys and loosely typed values are errors
    lenient,  // unknown keys ignored, numeric annotation values accepted
};

/// Parses one plot-code object. Python-style tuples such as ("A", "B") are
/// accepted wherever a JSON array is expected.
///
/// Throws SchemaError, DanglingLabel, DuplicateCircleId, CoordError or
/// DegenerateCircle (non-positive literal radius).
PlotCode parse_plotcode(std::string_view bytes, SchemaMode mode = SchemaMode::lenient);
PlotCode plotcode_from_json(const nlohmann::json& j, SchemaMode mode = SchemaMode::lenient);

/// Fixed key order, sorted labels, canonical deduplicated segments.
nlohmann::ordered_json plotcode_to_json(const PlotCode& pc);
std::string canonical_serialize(const PlotCode& pc);

/// Equality up to segment orientation, order and duplicates.
bool structurally_equal(const PlotCode& a, const PlotCode& b);

Segment canonical_segment(const Label& a, const Label& b);
bool is_circle_id(std::string_view s);

/// Throws DegenerateCircle for collinear three-point specs or zero radius,
/// DanglingLabel for labels missing from `points`.
Circle2 resolve_circle(const CircleSpec& spec, const std::map<Label, Point2>& points);

/// Circle ID to resolved circle, for every circle of the plot code.
std::map<std::string, Circle2> resolve_circles(const PlotCode& pc);

/// Rewrites every circle as center + floor(radius). Centers reuse the
/// defining label, or a point already sitting at the resolved center, or a
/// new O1, O2, ... label. Throws DegenerateCircle when the floor is 0.
PlotCode simplify_for_training(const PlotCode& pc);

}  // namespace geoforge::schema
