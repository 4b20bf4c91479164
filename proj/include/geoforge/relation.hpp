#pragma once

#include "geoforge/predicate.hpp"
#include "geoforge/scene.hpp"

namespace geoforge::core {

/// Mixed tolerance: a length-like residual passes when it is at most
/// max(eps_abs, eps_rel * |reference|); angular residuals use eps_angle_deg.
struct Tolerance {
    double eps_abs = 1e-6;
    double eps_angle_deg = 1e-6;
    double eps_rel = 1e-9;
};

struct RelationMeasure {
    double residual = 0.0;
    double reference = 0.0;  // magnitude the residual is relative to
    bool angular = false;    // residual in degrees
};

enum class AngleMode {
    undirected,  // acute angle between lines, in [0, 90]
    directed,    // rotation from the first line to the second, modulo 180
};

/// Numeric residual of `p` on the witness.
///
/// perp/para/eqangle compare undirected line angles in degrees. coll uses the
/// triangle area, cyclic/circle the spread of distances to the fitted center,
/// the ratio kinds the difference of the two ratios. Similar and congruent
/// triangles also require matching (or, for the reversed kinds, opposite)
/// orientation; a mismatch yields residual 1. Non-degeneracy kinds give 0 when
/// check_nondegenerate holds and 1 otherwise. `mode` only affects eqangle.
/// Throws UnknownPoint.
RelationMeasure measure_relation(const Predicate& p, const Witness& w,
                                 AngleMode mode = AngleMode::undirected);

bool within_tolerance(const RelationMeasure& m, const Tolerance& tol);

inline bool relation_holds(const Predicate& p, const Witness& w, const Tolerance& tol = {},
                           AngleMode mode = AngleMode::undirected) {
    return within_tolerance(measure_relation(p, w, mode), tol);
}

}  // namespace geoforge::core
