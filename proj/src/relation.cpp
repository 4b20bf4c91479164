#include "geoforge/relation.hpp"

#include "geoforge/errors.hpp"
#include "geoforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geoforge::core {

namespace {

double acute_line_angle_deg(Point2 a, Point2 b, Point2 c, Point2 d) {
    return rad_to_deg(line_angle(a, b, c, d));
}

double directed_line_angle_deg(Point2 a, Point2 b, Point2 c, Point2 d) {
    const Point2 u = b - a;
    const Point2 v = d - c;
    double t = rad_to_deg(std::atan2(cross(u, v), dot(u, v)));
    t = std::fmod(t, 180.0);
    return t < 0 ? t + 180.0 : t;
}

double safe_ratio(double num, double den) {
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return num / den;
}

RelationMeasure ratio_difference(double r1, double r2) {
    if (!std::isfinite(r1) || !std::isfinite(r2)) return {1.0, 1.0, false};
    return {std::abs(r1 - r2), std::max(std::abs(r1), std::abs(r2)), false};
}

// Spread of |center - q| over `on`, relative to the radius.
RelationMeasure circle_spread(Point2 center, std::span<const Point2> on) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Point2 q : on) {
        const double r = distance(center, q);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return {hi - lo, hi, false};
}

int orientation(Point2 a, Point2 b, Point2 c) {
    const double o = orient(a, b, c);
    const double scale = std::max({distance(a, b), distance(b, c), distance(c, a)});
    if (std::abs(o) <= 1e-12 * scale * scale) return 0;
    return o > 0 ? 1 : -1;
}

RelationMeasure triangles(const std::vector<Point2>& p, bool congruent, bool reversed) {
    const double s1[3] = {distance(p[0], p[1]), distance(p[1], p[2]), distance(p[2], p[0])};
    const double s2[3] = {distance(p[3], p[4]), distance(p[4], p[5]), distance(p[5], p[3])};
    const int o1 = orientation(p[0], p[1], p[2]);
    const int o2 = orientation(p[3], p[4], p[5]);
    if (o1 == 0 || o2 == 0 || (reversed ? o1 == o2 : o1 != o2)) return {1.0, 1.0, false};
    RelationMeasure m;
    if (congruent) {
        for (int i = 0; i < 3; ++i) {
            m.residual = std::max(m.residual, std::abs(s1[i] - s2[i]));
            m.reference = std::max({m.reference, s1[i], s2[i]});
        }
        return m;
    }
    const double k[3] = {s2[0] / s1[0], s2[1] / s1[1], s2[2] / s1[2]};
    m.residual = std::max({k[0], k[1], k[2]}) - std::min({k[0], k[1], k[2]});
    m.reference = std::max({k[0], k[1], k[2]});
    return m;
}

}  // namespace

RelationMeasure measure_relation(const Predicate& p, const Witness& w, AngleMode mode) {
    using K = PredicateKind;
    check_arity(p.kind, p.args.size(), p.constant.has_value());
    std::vector<Point2> q;
    q.reserve(p.args.size());
    for (const auto& label : p.args) q.push_back(w.at(label));

    switch (p.kind) {
    case K::perp:
        return {std::abs(90.0 - acute_line_angle_deg(q[0], q[1], q[2], q[3])), 90.0, true};
    case K::para:
        return {acute_line_angle_deg(q[0], q[1], q[2], q[3]), 0.0, true};
    case K::cong: {
        const double a = distance(q[0], q[1]);
        const double b = distance(q[2], q[3]);
        return {std::abs(a - b), std::max(a, b), false};
    }
    case K::coll: {
        const double longest = std::max({distance(q[0], q[1]), distance(q[1], q[2]), distance(q[2], q[0])});
        return {std::abs(orient(q[0], q[1], q[2])) / 2.0, longest * longest, false};
    }
    case K::midp: {
        const double a = distance(q[0], q[1]);
        const double b = distance(q[0], q[2]);
        const double area = std::abs(orient(q[0], q[1], q[2])) / 2.0;
        return {std::max(std::abs(a - b), area), distance(q[1], q[2]), false};
    }
    case K::circle:
        return circle_spread(q[0], std::span<const Point2>(q).subspan(1));
    case K::cyclic: {
        auto c = circumcircle(q[0], q[1], q[2]);
        if (!c) return {1.0, 1.0, false};
        return circle_spread(c->center, q);
    }
    case K::eqangle: {
        if (mode == AngleMode::directed) {
            const double d1 = directed_line_angle_deg(q[0], q[1], q[2], q[3]);
            const double d2 = directed_line_angle_deg(q[4], q[5], q[6], q[7]);
            const double diff = std::abs(d1 - d2);
            return {std::min(diff, 180.0 - diff), std::max(d1, d2), true};
        }
        const double a1 = acute_line_angle_deg(q[0], q[1], q[2], q[3]);
        const double a2 = acute_line_angle_deg(q[4], q[5], q[6], q[7]);
        return {std::abs(a1 - a2), std::max(a1, a2), true};
    }
    case K::eqratio:
        return ratio_difference(safe_ratio(distance(q[0], q[1]), distance(q[2], q[3])),
                                safe_ratio(distance(q[4], q[5]), distance(q[6], q[7])));
    case K::eqratio3:
        // (a b c d m n): MA / MC = NB / ND
        return ratio_difference(safe_ratio(distance(q[4], q[0]), distance(q[4], q[2])),
                                safe_ratio(distance(q[5], q[1]), distance(q[5], q[3])));
    case K::rconst:
        return ratio_difference(safe_ratio(distance(q[0], q[1]), distance(q[2], q[3])),
                                p.constant->value());
    case K::simtri:
        return triangles(q, false, false);
    case K::simtrir:
        return triangles(q, false, true);
    case K::contri:
        return triangles(q, true, false);
    case K::contrir:
        return triangles(q, true, true);
    case K::ncoll:
    case K::npara:
    case K::sameside:
    case K::nsameside:
    case K::sameclock:
        return {check_nondegenerate(w, p) ? 0.0 : 1.0, 0.0, false};
    }
    return {1.0, 1.0, false};
}

bool within_tolerance(const RelationMeasure& m, const Tolerance& tol) {
    if (!std::isfinite(m.residual)) return false;
    if (m.angular) return m.residual <= tol.eps_angle_deg;
    return m.residual <= std::max(tol.eps_abs, tol.eps_rel * std::abs(m.reference));
}

}  // namespace geoforge::core
