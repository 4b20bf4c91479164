#include "geoforge/reference_responder.hpp"

#include "geoforge/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>

namespace geoforge::pipeline {

using gateway::Role;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Corruption, std::string_view>, 5> kCorruptions{{
    {Corruption::semantic_verdict, "semantic_verdict"},
    {Corruption::wrong_length, "wrong_length"},
    {Corruption::degenerate_circle, "degenerate_circle"},
    {Corruption::overlapping_layout, "overlapping_layout"},
    {Corruption::broken_plot_code, "broken_plot_code"},
}};

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// Right-angle triple for a perp whose lines meet at a shared label.
std::optional<schema::Triple> right_angle_of(const core::Predicate& p) {
    if (p.kind != core::PredicateKind::perp) return std::nullopt;
    const auto& a = p.args;
    for (int i = 0; i < 2; ++i)
        for (int j = 2; j < 4; ++j)
            if (a[i] == a[j]) return schema::Triple{a[1 - i], a[i], a[5 - j]};
    return std::nullopt;
}

struct Asked {
    std::string phrase;
    std::string quantity;
    std::string answer;
};

Asked asked_quantity(const core::Predicate& t, const core::Witness& w) {
    const auto& a = t.args;
    auto len = [&](const std::string& x, const std::string& y) { return "length(" + x + ", " + y + ")"; };
    auto ratio = [&](const std::string& x, const std::string& y, const std::string& u, const std::string& v) {
        return distance(w.at(x), w.at(y)) / distance(w.at(u), w.at(v));
    };
    switch (t.kind) {
    case core::PredicateKind::rconst:
        return {"the ratio " + a[0] + a[1] + "/" + a[2] + a[3], len(a[0], a[1]) + " / " + len(a[2], a[3]),
                t.constant->to_string()};
    case core::PredicateKind::eqratio:
        return {"the ratio " + a[0] + a[1] + "/" + a[2] + a[3], len(a[0], a[1]) + " / " + len(a[2], a[3]),
                shortest(ratio(a[0], a[1], a[2], a[3]))};
    case core::PredicateKind::eqratio3:
        return {"the ratio " + a[4] + a[0] + "/" + a[4] + a[2], len(a[4], a[0]) + " / " + len(a[4], a[2]),
                shortest(ratio(a[4], a[0], a[4], a[2]))};
    default: throw ConfigError("target " + core::to_text(t) + " has no value to ask for");
    }
}

std::vector<schema::Segment> segments_of(const core::Predicate& p) {
    using K = core::PredicateKind;
    const auto& a = p.args;
    std::vector<schema::Segment> out;
    auto add = [&](const std::string& x, const std::string& y) {
        if (x != y) out.push_back(schema::canonical_segment(x, y));
    };
    switch (p.kind) {
    case K::perp:
    case K::para:
    case K::cong:
    case K::rconst: add(a[0], a[1]), add(a[2], a[3]); break;
    case K::eqangle:
    case K::eqratio:
        for (std::size_t i = 0; i < 8; i += 2) add(a[i], a[i + 1]);
        break;
    case K::eqratio3: add(a[4], a[0]), add(a[4], a[2]), add(a[5], a[1]), add(a[5], a[3]); break;
    case K::midp: add(a[1], a[0]), add(a[0], a[2]); break;
    case K::coll:
        for (std::size_t i = 0; i + 1 < a.size(); ++i) add(a[i], a[i + 1]);  // split below
        break;
    case K::simtri:
    case K::simtrir:
    case K::contri:
    case K::contrir:
        add(a[0], a[1]), add(a[1], a[2]), add(a[2], a[0]);
        add(a[3], a[4]), add(a[4], a[5]), add(a[5], a[3]);
        break;
    default: break;
    }
    return out;
}

// Replaces every segment that passes through another labelled point by its
// consecutive pieces, so collinear points never close a flat triangle.
std::set<schema::Segment> split_segments(const std::set<schema::Segment>& segs,
                                         const std::map<std::string, Point2>& pts) {
    std::set<schema::Segment> out;
    for (const auto& [x, y] : segs) {
        const Point2 p = pts.at(x), q = pts.at(y);
        const double len = distance(p, q);
        std::vector<std::pair<double, std::string>> on{{0.0, x}, {1.0, y}};
        for (const auto& [l, r] : pts) {
            if (l == x || l == y) continue;
            const double t = dot(r - p, q - p) / (len * len);
            if (t <= 1e-9 || t >= 1 - 1e-9) continue;
            if (std::abs(orient(p, q, r)) / len <= 1e-9 * std::max(1.0, len)) on.emplace_back(t, l);
        }
        std::sort(on.begin(), on.end());
        for (std::size_t i = 0; i + 1 < on.size(); ++i) out.insert(schema::canonical_segment(on[i].second, on[i + 1].second));
    }
    return out;
}

std::string question_text(const std::vector<std::string>& givens, const std::string& ask) {
    if (givens.empty()) return ask;
    return "Given " + join(givens, ", ") + ". " + ask;
}

std::string ask_text(const Attempt& a) {
    if (a.kind == verify::ProblemKind::computation)
        return "Find " + asked_quantity(a.seed.targets.front(), a.seed.witness).phrase + ".";
    std::vector<std::string> ts;
    for (const auto& t : a.seed.targets) ts.push_back(deduction::describe(t));
    return "Prove that " + join(ts, " and ") + ".";
}

}  // namespace

std::string_view corruption_name(Corruption c) {
    for (const auto& [k, n] : kCorruptions)
        if (k == c) return n;
    return "";
}

Corruption corruption_from_name(std::string_view name) {
    for (const auto& [k, n] : kCorruptions)
        if (n == name) return k;
    throw ConfigError("unknown corruption '" + std::string(name) + "'");
}

verify::Stage intended_stage(Corruption c) {
    switch (c) {
    case Corruption::semantic_verdict: return verify::Stage::semantic;
    case Corruption::wrong_length: return verify::Stage::geometric;
    case Corruption::degenerate_circle:
    case Corruption::broken_plot_code: return verify::Stage::plotting;
    case Corruption::overlapping_layout: return verify::Stage::image;
    }
    return verify::Stage::semantic;
}

CorruptionPlan corruption_plan_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("corruption plan must map attempt ids to corruption names");
    CorruptionPlan plan;
    for (const auto& [id, v] : j.items()) {
        if (!v.is_string()) throw ConfigError("corruption for " + id + " must be a string");
        plan[id] = corruption_from_name(v.get<std::string>());
    }
    return plan;
}

ordered_json corruption_plan_to_json(const CorruptionPlan& plan) {
    ordered_json j = ordered_json::object();
    for (const auto& [id, c] : plan) j[id] = corruption_name(c);
    return j;
}

schema::PlotCode reference_plot_code(const Attempt& a) {
    const auto& seed = a.seed;
    std::set<std::string> labels;
    std::vector<core::Predicate> all = seed.premises;
    all.insert(all.end(), seed.targets.begin(), seed.targets.end());
    for (const auto& s : seed.steps) {
        all.insert(all.end(), s.inputs.begin(), s.inputs.end());
        all.push_back(s.output);
    }
    for (const auto& p : all) labels.insert(p.args.begin(), p.args.end());

    schema::PlotCode pc;
    for (const auto& l : labels) pc.points[l] = seed.witness.at(l);

    std::set<schema::Segment> segs;
    for (const auto& p : seed.premises)
        for (const auto& s : segments_of(p)) segs.insert(s);
    for (const auto& p : seed.targets)
        for (const auto& s : segments_of(p)) segs.insert(s);
    for (const auto& s : split_segments(segs, pc.points)) pc.segments.push_back(s);

    std::vector<Circle2> seen;
    auto add_circle = [&](schema::CircleSpec spec) {
        const Circle2 c = schema::resolve_circle(spec, pc.points);
        for (const auto& s : seen)
            if (distance(s.center, c.center) <= 1e-9 * std::max(1.0, c.radius) &&
                std::abs(s.radius - c.radius) <= 1e-9 * std::max(1.0, c.radius))
                return;
        seen.push_back(c);
        spec.id = "C" + std::to_string(pc.circles.size() + 1);
        pc.circles.push_back(std::move(spec));
    };
    for (const auto& p : all) {
        if (p.kind == core::PredicateKind::circle)
            add_circle({"", schema::CircleSpec::Form::center_point, {p.args[0], p.args[1]}, 0.0});
        else if (p.kind == core::PredicateKind::cyclic)
            add_circle({"", schema::CircleSpec::Form::three_points, {p.args[0], p.args[1], p.args[2]}, 0.0});
    }

    for (const auto& p : seed.premises)
        if (auto t = right_angle_of(p)) pc.annotations.right_angles.push_back(*t);

    if (a.kind == verify::ProblemKind::computation) {
        pc.quantities.push_back(asked_quantity(seed.targets.front(), seed.witness).quantity);
    } else {
        for (const auto& t : seed.targets)
            for (auto& e : verify::zero_value_expressions(t)) pc.quantities.push_back(std::move(e));
    }
    return pc;
}

ReferenceResponder::ReferenceResponder(CorruptionPlan plan) : plan_(std::move(plan)) {}

void ReferenceResponder::begin(const Attempt& a) {
    current_ = a;
    auto it = plan_.find(a.id);
    fault_ = it == plan_.end() ? std::nullopt : std::optional<Corruption>(it->second);
}

std::string ReferenceResponder::instructor() const {
    const Attempt& a = *current_;
    std::vector<std::string> givens;
    for (const auto& p : a.seed.premises) givens.push_back(deduction::describe(p));

    std::vector<std::string> steps;
    for (std::size_t i = 0; i < a.text.step_texts.size(); ++i)
        steps.push_back("Step" + std::to_string(i + 1) + " " + a.text.step_texts[i] + ".");
    steps.push_back("Step" + std::to_string(steps.size() + 1) + " Hence " + a.text.target_text + ".");

    ordered_json j;
    j["question"] = question_text(givens, ask_text(a));
    j["cot"] = join(steps, "\n");
    j["answer"] = a.kind == verify::ProblemKind::computation
                      ? asked_quantity(a.seed.targets.front(), a.seed.witness).answer
                      : "proved";
    return j.dump();
}

std::string ReferenceResponder::question_without_annotated() const {
    const Attempt& a = *current_;
    std::vector<std::string> givens;
    for (const auto& p : a.seed.premises)
        if (!right_angle_of(p)) givens.push_back(deduction::describe(p));
    return question_text(givens, ask_text(a));
}

std::string ReferenceResponder::coder() const {
    const Attempt& a = *current_;
    if (fault_ == Corruption::broken_plot_code) return "```python\nresult = {\"points\": {\"A\": (0, 0),\n```";
    schema::PlotCode pc = reference_plot_code(a);
    if (fault_ == Corruption::wrong_length) {
        const auto [x, y] = pc.segments.empty()
                                ? schema::canonical_segment(pc.points.begin()->first, std::next(pc.points.begin())->first)
                                : pc.segments.front();
        pc.annotations.length_of_line.push_back(
            {{x, y}, shortest(distance(pc.points.at(x), pc.points.at(y)) + 0.5)});
    } else if (fault_ == Corruption::degenerate_circle) {
        const auto& first = pc.points.begin()->first;
        const auto& second = std::next(pc.points.begin())->first;
        pc.circles.push_back({"C" + std::to_string(pc.circles.size() + 1), schema::CircleSpec::Form::three_points,
                              {first, second, first}, 0.0});
    } else if (fault_ == Corruption::overlapping_layout) {
        core::Witness w = a.scene.witness;
        for (const auto& [l, p] : pc.points) w.coords.emplace(l, p);
        const std::string extra = core::next_free_label(w);
        double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
        for (const auto& [_, p] : pc.points) {
            lo_x = std::min(lo_x, p.x), hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y), hi_y = std::max(hi_y, p.y);
        }
        const double diag = std::hypot(hi_x - lo_x, hi_y - lo_y);
        pc.points[extra] = pc.points.begin()->second + Point2{0.005 * diag, 0.0};
    }
    return "```json\n" + schema::plotcode_to_json(pc).dump(2) + "\n```";
}

std::string ReferenceResponder::respond(Role role, const std::string&) {
    if (!current_) throw ConfigError("reference responder used outside an attempt");
    const Attempt& a = *current_;
    ordered_json j;
    switch (role) {
    case Role::instructor_computation:
    case Role::instructor_proof: return instructor();
    case Role::judge:
        if (fault_ == Corruption::semantic_verdict) {
            j["passed"] = false;
            j["reason"] = "The stated answer does not follow from the conditions.";
        } else {
            j["passed"] = true;
            j["reason"] = "The conditions are consistent and determine the answer.";
        }
        return j.dump();
    case Role::coder_plotcode: return coder();
    case Role::debias_step1: {
        std::vector<std::string> givens;
        for (const auto& p : a.seed.premises) givens.push_back(deduction::describe(p));
        j["question_sanitized"] = question_text(givens, ask_text(a));
        return j.dump();
    }
    case Role::debias_step2: j["question_sanitized"] = question_without_annotated(); return j.dump();
    case Role::cot_rewrite: {
        std::vector<std::string> steps{"Step 1: From the image, read the marked right angles and the drawn segments."};
        for (const auto& s : a.text.step_texts) steps.push_back("Step " + std::to_string(steps.size() + 1) + ": " + s + ".");
        steps.push_back("Step " + std::to_string(steps.size() + 1) + ": Hence " + a.text.target_text + ".");
        j["cot"] = join(steps, "\n");
        return j.dump();
    }
    case Role::image_qc:
        j["passed"] = true;
        j["reason"] = "Lines and labels are legible.";
        return j.dump();
    case Role::caption: j["caption"] = "A geometry diagram."; return j.dump();
    }
    return "{}";
}

SynthResult synthesize(const PipelineConfig& cfg, const CorruptionPlan& plan) {
    auto transcript = std::make_shared<gateway::Transcript>();
    ReferenceResponder ref(plan);
    // A prompt seen before gets its recorded answer, as the mock would give.
    gateway::CallbackGateway callback([&](Role r, const std::string& prompt) {
        if (auto seen = transcript->find(gateway::prompt_hash(r, prompt))) return *seen;
        return ref.respond(r, prompt);
    });
    gateway::RecordingGateway recorder(callback, transcript);
    RunHooks hooks;
    hooks.on_attempt = [&](const Attempt& a) { ref.begin(a); };
    RunResult result = run(cfg, recorder, hooks);
    return {std::move(result), transcript};
}

}  // namespace geoforge::pipeline
