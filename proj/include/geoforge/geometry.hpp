#pragma once

// Plane primitives shared by the verifier, the quantities DSL and the renderer.
// Coordinates are mathematical (y up) everywhere in the library.

#include <cmath>
#include <numbers>
#include <optional>
#include <span>

namespace geoforge {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(Point2 a, double s) { return {a.x * s, a.y * s}; }
inline Point2 operator*(double s, Point2 a) { return a * s; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
inline Point2 midpoint(Point2 a, Point2 b) { return {(a.x + b.x) / 2, (a.y + b.y) / 2}; }

/// Twice the signed area of triangle abc; positive for counter-clockwise order.
inline double orient(Point2 a, Point2 b, Point2 c) { return cross(b - a, c - a); }

inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }
inline double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }

/// Angle at `vertex` between rays to a and c, in radians within [0, pi].
/// Callers must ensure neither ray is zero-length.
inline double vertex_angle(Point2 a, Point2 vertex, Point2 c) {
    const Point2 u = a - vertex;
    const Point2 v = c - vertex;
    return std::atan2(std::abs(cross(u, v)), dot(u, v));
}

/// Acute angle between the undirected lines ab and cd, in radians within [0, pi/2].
inline double line_angle(Point2 a, Point2 b, Point2 c, Point2 d) {
    const Point2 u = b - a;
    const Point2 v = d - c;
    return std::atan2(std::abs(cross(u, v)), std::abs(dot(u, v)));
}

struct Circle2 {
    Point2 center;
    double radius = 0.0;
};

/// Circumcircle through three points, or nullopt when they are collinear
/// (relative to the size of the triangle).
inline std::optional<Circle2> circumcircle(Point2 a, Point2 b, Point2 c) {
    const Point2 ab = b - a;
    const Point2 ac = c - a;
    const double d = 2.0 * cross(ab, ac);
    const double scale = std::max(dot(ab, ab), dot(ac, ac));
    if (scale == 0.0 || std::abs(d) <= 1e-12 * scale) return std::nullopt;
    const double ab2 = dot(ab, ab);
    const double ac2 = dot(ac, ac);
    const Point2 offset{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
    return Circle2{a + offset, norm(offset)};
}

/// Orthogonal projection of p onto the line through a and b.
inline Point2 project_onto_line(Point2 p, Point2 a, Point2 b) {
    const Point2 d = b - a;
    const double t = dot(p - a, d) / dot(d, d);
    return a + d * t;
}

/// Intersection of lines (a,b) and (c,d); nullopt when (nearly) parallel.
inline std::optional<Point2> line_intersection(Point2 a, Point2 b, Point2 c, Point2 d) {
    const Point2 r = b - a;
    const Point2 s = d - c;
    const double denom = cross(r, s);
    if (std::abs(denom) <= 1e-12 * norm(r) * norm(s)) return std::nullopt;
    const double t = cross(c - a, s) / denom;
    return a + r * t;
}

/// Absolute shoelace area of a polygon in the given vertex order.
inline double polygon_area(std::span<const Point2> pts) {
    double twice = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Point2& p = pts[i];
        const Point2& q = pts[(i + 1) % pts.size()];
        twice += p.x * q.y - q.x * p.y;
    }
    return std::abs(twice) / 2.0;
}

}  // namespace geoforge
