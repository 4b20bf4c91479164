#pragma once

#include "geoforge/geometry.hpp"
#include "geoforge/predicate.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace geoforge::core {

/// Concrete coordinates for every label of a scene.
struct Witness {
    std::map<PointLabel, Point2> coords;

    /// Throws UnknownPoint for labels not in the witness.
    Point2 at(const PointLabel& label) const;
    bool has(const PointLabel& label) const { return coords.count(label) > 0; }
    /// Largest pairwise distance (0 for fewer than two points).
    double diameter() const;

    bool operator==(const Witness&) const = default;
};

struct NondegeneracyTolerance {
    double area_rel = 1e-6;   // |orient| relative to the squared longest side
    double angle_rad = 1e-6;  // npara
    double side_rel = 1e-9;   // sameside dot products, relative to |u||v|
};

/// Numeric discharge of ncoll / npara / sameclock / sameside / nsameside.
///
/// sameside(m, a, b, n, c, d) holds when m sits on the same side of a and b
/// as n does of c and d, i.e. the dot products (a-m).(b-m) and (c-n).(d-n)
/// are non-negligible with equal signs. nsameside requires opposite signs.
bool check_nondegenerate(const Witness& w, const Predicate& p,
                         const NondegeneracyTolerance& tol = {});

struct SceneBudget {
    int max_points = 10;
    int max_constructions = 8;
};

struct SamplerConfig {
    double coord_range = 10.0;       // base triangle drawn from [-range, range]^2
    double min_separation = 1e-3;    // fraction of scene diameter
    double min_height = 1e-2;        // fraction of scene diameter
    double base_min_angle_deg = 20.0;
    int retry_cap = 200;             // degenerate draws tolerated per scene
};

struct ConstructionStep {
    std::string name;  // "midpoint", "foot", "circumcenter", ...
    std::vector<PointLabel> inputs;
    PointLabel output;
};

struct Scene {
    Witness witness;
    std::vector<Predicate> predicates;  // canonical, sorted, guaranteed by construction
    std::vector<ConstructionStep> log;
};

/// Constructive random scene: a base triangle extended by midpoints, feet of
/// perpendiculars, parallels, perpendiculars, circumcenters, points on
/// circles, antipodes, rational division points and line intersections.
/// Deterministic for a fixed seed.
Scene sample_scene(std::uint64_t rng_seed, SceneBudget budget, const SamplerConfig& cfg = {});

/// Deterministic uniform helpers on top of mt19937_64 (the standard
/// distributions are implementation-defined, this is not).
class SceneRng {
public:
    explicit SceneRng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi);
    std::size_t index(std::size_t n);
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Label allocation: A..Z, then A1..Z1, A2.., skipping taken names and the
/// C<digits> pattern reserved for circle IDs.
PointLabel next_free_label(const Witness& w);

}  // namespace geoforge::core
