#include "geoforge/scene.hpp"

#include "geoforge/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <set>

namespace geoforge::core {

Point2 Witness::at(const PointLabel& label) const {
    auto it = coords.find(label);
    if (it == coords.end()) throw UnknownPoint("no coordinates for point '" + label + "'");
    return it->second;
}

double Witness::diameter() const {
    double best = 0.0;
    for (auto i = coords.begin(); i != coords.end(); ++i)
        for (auto j = std::next(i); j != coords.end(); ++j)
            best = std::max(best, distance(i->second, j->second));
    return best;
}

namespace {

int sign_with_tol(double v, double tol) {
    if (v > tol) return 1;
    if (v < -tol) return -1;
    return 0;
}

int orientation_sign(Point2 a, Point2 b, Point2 c, double area_rel) {
    const double scale = std::max({dot(b - a, b - a), dot(c - a, c - a), dot(c - b, c - b)});
    return sign_with_tol(orient(a, b, c), area_rel * scale);
}

int side_sign(Point2 m, Point2 a, Point2 b, double side_rel) {
    const Point2 u = a - m;
    const Point2 v = b - m;
    return sign_with_tol(dot(u, v), side_rel * norm(u) * norm(v));
}

}  // namespace

bool check_nondegenerate(const Witness& w, const Predicate& p, const NondegeneracyTolerance& tol) {
    using K = PredicateKind;
    if (!is_nondegeneracy_kind(p.kind))
        throw InvalidPredicate(std::string(kind_name(p.kind)) + " is not a non-degeneracy condition");
    check_arity(p.kind, p.args.size(), p.constant.has_value());
    std::vector<Point2> pts;
    pts.reserve(p.args.size());
    for (const auto& label : p.args) pts.push_back(w.at(label));

    switch (p.kind) {
    case K::ncoll:
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                for (std::size_t k = j + 1; k < pts.size(); ++k)
                    if (orientation_sign(pts[i], pts[j], pts[k], tol.area_rel) != 0) return true;
        return false;
    case K::npara:
        if (pts[0] == pts[1] || pts[2] == pts[3]) return false;
        return line_angle(pts[0], pts[1], pts[2], pts[3]) > tol.angle_rad;
    case K::sameclock: {
        const int s1 = orientation_sign(pts[0], pts[1], pts[2], tol.area_rel);
        const int s2 = orientation_sign(pts[3], pts[4], pts[5], tol.area_rel);
        return s1 != 0 && s1 == s2;
    }
    case K::sameside:
    case K::nsameside: {
        const int s1 = side_sign(pts[0], pts[1], pts[2], tol.side_rel);
        const int s2 = side_sign(pts[3], pts[4], pts[5], tol.side_rel);
        if (s1 == 0 || s2 == 0) return false;
        return p.kind == K::sameside ? s1 == s2 : s1 != s2;
    }
    default:
        return false;
    }
}

double SceneRng::uniform(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * unit;
}

std::size_t SceneRng::index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

PointLabel next_free_label(const Witness& w) {
    for (int round = 0;; ++round) {
        for (char c = 'A'; c <= 'Z'; ++c) {
            PointLabel label(1, c);
            if (round > 0) label += std::to_string(round);
            if (c == 'C' && round > 0) continue;  // C<digits> names circles
            if (!w.has(label)) return label;
        }
    }
}

namespace {

struct CircleRecord {
    std::optional<PointLabel> center;
    std::vector<PointLabel> members;
    Circle2 geom;
};

struct Candidate {
    std::string name;
    std::vector<PointLabel> inputs;
    Point2 position;
    std::vector<std::pair<PointLabel, PointLabel>> joins_lines;  // new point lies on line XY
    std::vector<Predicate> predicates;
    std::function<void(const PointLabel&)> commit;  // bookkeeping once accepted
};

class SceneBuilder {
public:
    SceneBuilder(SceneRng& rng, const SamplerConfig& cfg) : rng_(rng), cfg_(cfg) {}

    bool place_base_triangle() {
        const double r = cfg_.coord_range;
        std::array<Point2, 3> p;
        for (auto& q : p) q = {rng_.uniform(-r, r), rng_.uniform(-r, r)};
        for (int i = 0; i < 3; ++i) {
            const double ang = rad_to_deg(vertex_angle(p[(i + 1) % 3], p[i], p[(i + 2) % 3]));
            if (!(ang >= cfg_.base_min_angle_deg)) return false;
        }
        if (distance(p[0], p[1]) < 0.2 * r) return false;
        witness_.coords = {{"A", p[0]}, {"B", p[1]}, {"C", p[2]}};
        return true;
    }

    std::optional<Candidate> propose() {
        std::vector<std::pair<int, std::function<std::optional<Candidate>()>>> menu = {
            {3, [&] { return midpoint(); }},      {2, [&] { return foot(); }},
            {1, [&] { return parallel(); }},      {1, [&] { return perpendicular(); }},
            {1, [&] { return circumcenter(); }},  {1, [&] { return ratio_point(); }},
            {2, [&] { return intersection(); }},  {2, [&] { return parallel_meet(); }},
        };
        if (!circles_.empty()) menu.push_back({2, [&] { return on_circle(); }});
        if (std::any_of(circles_.begin(), circles_.end(), [](auto& c) { return c.center.has_value(); }))
            menu.push_back({1, [&] { return antipode(); }});
        int total = 0;
        for (auto& m : menu) total += m.first;
        int pick = static_cast<int>(rng_.index(static_cast<std::size_t>(total)));
        for (auto& [weight, make] : menu) {
            if (pick < weight) return make();
            pick -= weight;
        }
        return std::nullopt;
    }

    bool accept(Candidate& c) {
        const Point2 p = c.position;
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
        if (std::abs(p.x) > 3 * cfg_.coord_range || std::abs(p.y) > 3 * cfg_.coord_range) return false;

        double diam = witness_.diameter();
        for (const auto& [l, q] : witness_.coords) diam = std::max(diam, distance(p, q));
        for (const auto& [l, q] : witness_.coords)
            if (distance(p, q) < cfg_.min_separation * diam) return false;

        // Any triangle formed with the new point must be well-shaped unless
        // the construction places the point on that line.
        std::vector<std::set<PointLabel>> new_lines;
        for (const auto& [x, y] : c.joins_lines) {
            std::set<PointLabel> line = line_through(x, y);
            line.insert(x);
            line.insert(y);
            new_lines.push_back(std::move(line));
        }
        auto declared = [&](const PointLabel& x, const PointLabel& y) {
            return std::any_of(new_lines.begin(), new_lines.end(),
                               [&](auto& l) { return l.count(x) && l.count(y); });
        };
        for (auto i = witness_.coords.begin(); i != witness_.coords.end(); ++i) {
            for (auto j = std::next(i); j != witness_.coords.end(); ++j) {
                if (declared(i->first, j->first)) continue;
                const Point2 a = i->second;
                const Point2 b = j->second;
                const double longest = std::max({distance(a, b), distance(a, p), distance(b, p)});
                const double height = std::abs(orient(a, b, p)) / longest;
                if (height < cfg_.min_height * diam) return false;
            }
        }
        // Existing triangles must stay well-shaped relative to the grown diameter.
        if (diam > witness_.diameter() && !existing_shapes_ok(diam)) return false;

        const PointLabel label = next_free_label(witness_);
        witness_.coords[label] = p;
        for (auto& line : new_lines) {
            line.insert(label);
            add_line(std::move(line));
        }
        for (auto& pred : c.predicates) {
            for (auto& arg : pred.args)
                if (arg == "?") arg = label;
            predicates_.push_back(canonicalize(make_predicate(pred.kind, pred.args, pred.constant)));
        }
        if (c.commit) c.commit(label);
        log_.push_back(ConstructionStep{c.name, c.inputs, label});
        return true;
    }

    Scene finish() {
        std::sort(predicates_.begin(), predicates_.end());
        predicates_.erase(std::unique(predicates_.begin(), predicates_.end()), predicates_.end());
        return Scene{witness_, predicates_, log_};
    }

    std::size_t point_count() const { return witness_.coords.size(); }

private:
    // -- helpers -----------------------------------------------------------

    std::vector<PointLabel> labels() const {
        std::vector<PointLabel> out;
        for (const auto& [l, p] : witness_.coords) out.push_back(l);
        return out;
    }

    std::vector<PointLabel> pick_distinct(std::size_t n) {
        auto all = labels();
        if (all.size() < n) return {};
        std::vector<PointLabel> out;
        while (out.size() < n) {
            const auto& l = all[rng_.index(all.size())];
            if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
        }
        return out;
    }

    Point2 at(const PointLabel& l) const { return witness_.at(l); }

    std::set<PointLabel> line_through(const PointLabel& x, const PointLabel& y) const {
        for (const auto& line : lines_)
            if (line.count(x) && line.count(y)) return line;
        return {};
    }

    bool on_common_line(const PointLabel& x, const PointLabel& y, const PointLabel& z) const {
        return std::any_of(lines_.begin(), lines_.end(),
                           [&](auto& l) { return l.count(x) && l.count(y) && l.count(z); });
    }

    bool well_shaped(const PointLabel& x, const PointLabel& y, const PointLabel& z) const {
        if (on_common_line(x, y, z)) return false;
        const Point2 a = at(x), b = at(y), c = at(z);
        const double longest = std::max({distance(a, b), distance(a, c), distance(b, c)});
        return std::abs(orient(a, b, c)) / longest >= cfg_.min_height * witness_.diameter();
    }

    bool existing_shapes_ok(double diam) const {
        for (auto i = witness_.coords.begin(); i != witness_.coords.end(); ++i)
            for (auto j = std::next(i); j != witness_.coords.end(); ++j) {
                if (distance(i->second, j->second) < cfg_.min_separation * diam) return false;
                for (auto k = std::next(j); k != witness_.coords.end(); ++k) {
                    if (on_common_line(i->first, j->first, k->first)) continue;
                    const Point2 a = i->second, b = j->second, c = k->second;
                    const double longest =
                        std::max({distance(a, b), distance(a, c), distance(b, c)});
                    if (std::abs(orient(a, b, c)) / longest < cfg_.min_height * diam) return false;
                }
            }
        return true;
    }

    void add_line(std::set<PointLabel> line) {
        // Lines sharing two points are the same line.
        bool merged = true;
        while (merged) {
            merged = false;
            for (auto it = lines_.begin(); it != lines_.end(); ++it) {
                std::size_t shared = 0;
                for (const auto& l : *it) shared += line.count(l);
                if (shared >= 2) {
                    line.insert(it->begin(), it->end());
                    lines_.erase(it);
                    merged = true;
                    break;
                }
            }
        }
        lines_.push_back(std::move(line));
    }

    static Predicate pred(PredicateKind k, std::vector<PointLabel> args,
                          std::optional<Rational> constant = std::nullopt) {
        return Predicate{k, std::move(args), constant};
    }

    // -- constructions ----------------------------------------------------
    // The new point is written "?" in predicate templates.

    std::optional<Candidate> midpoint() {
        auto v = pick_distinct(2);
        if (v.empty()) return std::nullopt;
        return Candidate{"midpoint", v, geoforge::midpoint(at(v[0]), at(v[1])), {{v[0], v[1]}},
                         {pred(PredicateKind::midp, {"?", v[0], v[1]})}, nullptr};
    }

    std::optional<Candidate> foot() {
        auto v = pick_distinct(3);
        if (v.empty()) return std::nullopt;
        if (!well_shaped(v[0], v[1], v[2])) return std::nullopt;
        const Point2 h = project_onto_line(at(v[0]), at(v[1]), at(v[2]));
        return Candidate{"foot", v, h, {{v[1], v[2]}},
                         {pred(PredicateKind::perp, {v[0], "?", v[1], v[2]}),
                          pred(PredicateKind::coll, {"?", v[1], v[2]})},
                         nullptr};
    }

    std::optional<Candidate> parallel() {
        auto v = pick_distinct(3);
        if (v.empty()) return std::nullopt;
        if (!well_shaped(v[0], v[1], v[2])) return std::nullopt;
        double t = rng_.uniform(0.4, 1.2) * (rng_.index(2) ? 1.0 : -1.0);
        const Point2 q = at(v[0]) + (at(v[2]) - at(v[1])) * t;
        return Candidate{"parallel", v, q, {},
                         {pred(PredicateKind::para, {v[0], "?", v[1], v[2]})}, nullptr};
    }

    std::optional<Candidate> perpendicular() {
        auto v = pick_distinct(3);
        if (v.empty()) return std::nullopt;
        // Half of the time the perpendicular is raised at an endpoint of the line.
        const PointLabel base = rng_.index(2) ? v[0] : v[1];
        const Point2 d = at(v[2]) - at(v[1]);
        const double t = rng_.uniform(0.4, 1.2) * (rng_.index(2) ? 1.0 : -1.0);
        const Point2 q = at(base) + Point2{-d.y, d.x} * t;
        return Candidate{"perpendicular", {base, v[1], v[2]}, q, {},
                         {pred(PredicateKind::perp, {base, "?", v[1], v[2]})}, nullptr};
    }

    std::optional<Candidate> circumcenter() {
        auto v = pick_distinct(3);
        if (v.empty()) return std::nullopt;
        if (!well_shaped(v[0], v[1], v[2])) return std::nullopt;
        auto circ = circumcircle(at(v[0]), at(v[1]), at(v[2]));
        if (!circ) return std::nullopt;
        for (const auto& c : circles_)
            if (distance(c.geom.center, circ->center) < 1e-6 * circ->radius) return std::nullopt;
        auto commit = [this, v, circ = *circ](const PointLabel& o) {
            circles_.push_back(CircleRecord{o, v, circ});
        };
        return Candidate{"circumcenter", v, circ->center, {},
                         {pred(PredicateKind::circle, {"?", v[0], v[1], v[2]}),
                          pred(PredicateKind::cong, {"?", v[0], "?", v[1]}),
                          pred(PredicateKind::cong, {"?", v[1], "?", v[2]}),
                          pred(PredicateKind::cong, {"?", v[0], "?", v[2]})},
                         commit};
    }

    std::optional<Candidate> on_circle() {
        const std::size_t ci = rng_.index(circles_.size());
        const CircleRecord& c = circles_[ci];
        const double theta = rng_.uniform(0.0, 2.0 * std::numbers::pi);
        const Point2 w = c.geom.center + Point2{std::cos(theta), std::sin(theta)} * c.geom.radius;
        std::vector<Predicate> preds;
        if (c.center) {
            preds.push_back(pred(PredicateKind::cong, {*c.center, "?", *c.center, c.members[0]}));
            preds.push_back(pred(PredicateKind::circle, {*c.center, "?", c.members[0], c.members[1]}));
        }
        std::vector<PointLabel> cyc = c.members;
        cyc.push_back("?");
        if (cyc.size() >= 4) preds.push_back(pred(PredicateKind::cyclic, cyc));
        auto commit = [this, ci](const PointLabel& l) { circles_[ci].members.push_back(l); };
        return Candidate{"on_circle", c.members, w, {}, std::move(preds), commit};
    }

    std::optional<Candidate> antipode() {
        std::vector<std::size_t> centered;
        for (std::size_t i = 0; i < circles_.size(); ++i)
            if (circles_[i].center) centered.push_back(i);
        const std::size_t ci = centered[rng_.index(centered.size())];
        const CircleRecord& c = circles_[ci];
        const PointLabel x = c.members[rng_.index(c.members.size())];
        const PointLabel& o = *c.center;
        const Point2 d = at(o) * 2.0 - at(x);
        const PointLabel other = c.members[0] == x ? c.members[1] : c.members[0];
        std::vector<Predicate> preds = {pred(PredicateKind::midp, {o, x, "?"}),
                                        pred(PredicateKind::circle, {o, "?", x, other})};
        std::vector<PointLabel> cyc = c.members;
        cyc.push_back("?");
        if (cyc.size() >= 4) preds.push_back(pred(PredicateKind::cyclic, cyc));
        auto commit = [this, ci](const PointLabel& l) { circles_[ci].members.push_back(l); };
        return Candidate{"antipode", {o, x}, d, {{o, x}}, std::move(preds), commit};
    }

    std::optional<Candidate> ratio_point() {
        static constexpr std::array<std::pair<int, int>, 6> kRatios = {
            {{1, 3}, {2, 3}, {1, 4}, {3, 4}, {2, 5}, {3, 5}}};
        auto v = pick_distinct(2);
        if (v.empty()) return std::nullopt;
        const auto [num, den] = kRatios[rng_.index(kRatios.size())];
        const Point2 p = at(v[0]) + (at(v[1]) - at(v[0])) * (static_cast<double>(num) / den);
        return Candidate{"ratio_point", v, p, {{v[0], v[1]}},
                         {pred(PredicateKind::coll, {v[0], "?", v[1]}),
                          pred(PredicateKind::rconst, {v[0], "?", v[0], v[1]}, Rational::make(num, den))},
                         nullptr};
    }

    std::optional<Candidate> intersection() {
        auto v = pick_distinct(4);
        if (v.empty()) return std::nullopt;
        if (on_common_line(v[0], v[1], v[2]) || on_common_line(v[0], v[1], v[3])) return std::nullopt;
        if (rad_to_deg(line_angle(at(v[0]), at(v[1]), at(v[2]), at(v[3]))) < 15.0) return std::nullopt;
        auto x = line_intersection(at(v[0]), at(v[1]), at(v[2]), at(v[3]));
        if (!x) return std::nullopt;
        return Candidate{"intersection", v, *x, {{v[0], v[1]}, {v[2], v[3]}},
                         {pred(PredicateKind::coll, {"?", v[0], v[1]}),
                          pred(PredicateKind::coll, {"?", v[2], v[3]})},
                         nullptr};
    }

    std::optional<Candidate> parallel_meet() {
        auto v = pick_distinct(5);
        if (v.empty()) return std::nullopt;
        if (!well_shaped(v[0], v[1], v[2])) return std::nullopt;
        const Point2 dir = at(v[2]) - at(v[1]);
        if (rad_to_deg(line_angle(at(v[1]), at(v[2]), at(v[3]), at(v[4]))) < 15.0) return std::nullopt;
        auto x = line_intersection(at(v[0]), at(v[0]) + dir, at(v[3]), at(v[4]));
        if (!x) return std::nullopt;
        return Candidate{"parallel_meet", v, *x, {{v[3], v[4]}},
                         {pred(PredicateKind::para, {v[0], "?", v[1], v[2]}),
                          pred(PredicateKind::coll, {"?", v[3], v[4]})},
                         nullptr};
    }

    SceneRng& rng_;
    const SamplerConfig& cfg_;
    Witness witness_;
    std::vector<Predicate> predicates_;
    std::vector<ConstructionStep> log_;
    std::vector<std::set<PointLabel>> lines_;
    std::vector<CircleRecord> circles_;
};

}  // namespace

Scene sample_scene(std::uint64_t rng_seed, SceneBudget budget, const SamplerConfig& cfg) {
    if (budget.max_points < 3) throw InvalidBudget("a scene needs room for a base triangle (3 points)");
    if (budget.max_constructions < 0) throw InvalidBudget("negative construction budget");

    SceneRng rng(rng_seed);
    SceneBuilder builder(rng, cfg);
    int retries = 0;
    while (!builder.place_base_triangle()) {
        if (++retries > cfg.retry_cap) throw SamplingFailed("could not place a base triangle");
    }
    int constructions = 0;
    while (constructions < budget.max_constructions &&
           builder.point_count() < static_cast<std::size_t>(budget.max_points)) {
        auto candidate = builder.propose();
        if (candidate && builder.accept(*candidate)) {
            ++constructions;
            continue;
        }
        if (++retries > cfg.retry_cap)
            throw SamplingFailed("degenerate draws exceeded the retry cap of " +
                                 std::to_string(cfg.retry_cap));
    }
    return builder.finish();
}

}  // namespace geoforge::core
