#include "geoforge/verifier.hpp"

#include "geoforge/errors.hpp"
#include "geoforge/quantity_dsl.hpp"

#include <array>
#include <cmath>

namespace geoforge::verify {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kStageNames{"semantic", "geometric", "plotting", "image"};

template <std::size_t N>
std::string join_labels(const std::array<std::string, N>& labels) {
    std::string out;
    for (const auto& l : labels) out += l;
    return out;
}

double answer_threshold(const ToleranceConfig& tol, double reference) {
    return std::max(tol.eps_abs, tol.eps_rel * std::abs(reference));
}

}  // namespace

void validate(const ToleranceConfig& tol) {
    if (!(tol.eps_abs > 0 && tol.eps_angle_deg > 0 && tol.eps_rel > 0))
        throw ConfigError("tolerances must be positive");
}

std::string_view stage_name(Stage s) { return kStageNames[static_cast<std::size_t>(s)]; }

std::optional<Stage> stage_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kStageNames.size(); ++i)
        if (kStageNames[i] == name) return static_cast<Stage>(i);
    return std::nullopt;
}

std::string_view kind_name(ProblemKind k) { return k == ProblemKind::proof ? "proof" : "computation"; }

ProblemKind problem_kind_from_name(std::string_view name) {
    if (name == "proof") return ProblemKind::proof;
    if (name == "computation") return ProblemKind::computation;
    throw ConfigError("unknown problem kind '" + std::string(name) + "'");
}

void VerificationReport::add(Check c) {
    overall = overall && c.pass;
    checks.push_back(std::move(c));
}

void VerificationReport::merge(const VerificationReport& other) {
    for (const auto& c : other.checks) add(c);
    if (!rejected_stage) rejected_stage = other.rejected_stage;
}

ordered_json VerificationReport::to_json() const {
    ordered_json j;
    j["overall"] = overall;
    j["rejected_stage"] = rejected_stage ? ordered_json(stage_name(*rejected_stage)) : ordered_json(nullptr);
    j["checks"] = ordered_json::array();
    for (const auto& c : checks) {
        ordered_json e;
        e["kind"] = c.kind;
        e["subject"] = c.subject;
        e["residual"] = c.residual ? ordered_json(*c.residual) : ordered_json(nullptr);
        e["pass"] = c.pass;
        e["reason"] = c.reason;
        j["checks"].push_back(std::move(e));
    }
    return j;
}

VerificationReport VerificationReport::from_json(const json& j) {
    VerificationReport r;
    for (const auto& e : j.at("checks")) {
        Check c;
        c.kind = e.at("kind").get<std::string>();
        c.subject = e.at("subject").get<std::string>();
        if (!e.at("residual").is_null()) c.residual = e.at("residual").get<double>();
        c.pass = e.at("pass").get<bool>();
        c.reason = e.at("reason").get<std::string>();
        r.add(std::move(c));
    }
    if (j.contains("rejected_stage") && j["rejected_stage"].is_string())
        r.rejected_stage = stage_from_name(j["rejected_stage"].get<std::string>());
    return r;
}

RelationCheck check_relation(const core::Predicate& p, const core::Witness& w, const ToleranceConfig& tol) {
    const core::RelationMeasure m = core::measure_relation(p, w);
    return {core::within_tolerance(m, tol), m.residual};
}

VerificationReport check_annotations(const schema::PlotCode& pc, const ToleranceConfig& tol) {
    VerificationReport report;
    const auto& pts = pc.points;
    auto angle_at = [&](const schema::Triple& t) {
        const Point2 a = pts.at(t[0]), b = pts.at(t[1]), c = pts.at(t[2]);
        if (norm(a - b) < 1e-12 || norm(c - b) < 1e-12) throw DegenerateAngle(join_labels(t));
        return rad_to_deg(vertex_angle(a, b, c));
    };

    for (const auto& t : pc.annotations.right_angles) {
        Check c{"right_angle", join_labels(t), std::nullopt, false, ""};
        try {
            const double r = std::abs(angle_at(t) - 90.0);
            c.residual = r;
            c.pass = r <= tol.eps_angle_deg;
            if (!c.pass) c.reason = "angle is not 90 degrees";
        } catch (const Error& e) {
            c.reason = e.what();
        }
        report.add(std::move(c));
    }
    for (const auto& [seg, literal] : pc.annotations.length_of_line) {
        Check c{"length_of_line", join_labels(seg) + " = " + literal, std::nullopt, false, ""};
        try {
            const double declared = dsl::parse_value_literal(literal, dsl::ValueContext::length);
            const double r = std::abs(distance(pts.at(seg[0]), pts.at(seg[1])) - declared);
            c.residual = r;
            c.pass = r <= std::max(tol.eps_abs, tol.eps_rel * std::abs(declared));
            if (!c.pass) c.reason = "length differs from annotation";
        } catch (const Error& e) {
            c.reason = e.what();
        }
        report.add(std::move(c));
    }
    for (const auto& [tri, literal] : pc.annotations.measure_of_angle) {
        Check c{"measure_of_angle", join_labels(tri) + " = " + literal, std::nullopt, false, ""};
        try {
            const double declared = dsl::parse_value_literal(literal, dsl::ValueContext::angle);
            const double r = std::abs(angle_at(tri) - declared);
            c.residual = r;
            c.pass = r <= tol.eps_angle_deg;
            if (!c.pass) c.reason = "angle differs from annotation";
        } catch (const Error& e) {
            c.reason = e.what();
        }
        report.add(std::move(c));
    }
    if (!report.overall) report.rejected_stage = Stage::geometric;
    return report;
}

VerificationReport verify_answer(const std::vector<std::string>& quantities, const schema::PlotCode& pc,
                                 const std::optional<std::string>& answer, ProblemKind kind,
                                 const ToleranceConfig& tol) {
    if (quantities.empty()) throw ConfigError("no quantity expressions to verify");
    if (kind == ProblemKind::computation && !answer) throw ConfigError("computation problem without an answer");
    VerificationReport report;

    std::map<std::string, Circle2> circles;
    try {
        circles = schema::resolve_circles(pc);
    } catch (const Error& e) {
        report.add(Check{"circle", "circles", std::nullopt, false, e.what()});
        report.rejected_stage = Stage::geometric;
        return report;
    }
    const dsl::Scene scene{pc.points, circles};

    std::optional<double> expected;
    if (kind == ProblemKind::computation) {
        try {
            expected = dsl::parse_value_literal(*answer, dsl::ValueContext::length);
        } catch (const Error& e) {
            report.add(Check{"answer", *answer, std::nullopt, false, e.what()});
        }
    }
    for (std::size_t i = 0; i < quantities.size(); ++i) {
        Check c{kind == ProblemKind::proof ? "zero_value" : "quantity", quantities[i], std::nullopt, false, ""};
        try {
            const double v = dsl::eval_quantity(*dsl::parse_quantity(quantities[i]), scene);
            if (!std::isfinite(v)) throw DivisionByZero("value is not finite");
            if (kind == ProblemKind::proof) {
                c.residual = std::abs(v);
                c.pass = std::abs(v) < tol.eps_abs;
                if (!c.pass) c.reason = "expression is not zero";
            } else if (i == 0) {
                c.kind = "answer";
                c.subject = quantities[i] + " = " + *answer;
                if (expected) {
                    const double r = std::abs(v - *expected);
                    c.residual = r;
                    c.pass = r < answer_threshold(tol, *expected);
                    if (!c.pass) c.reason = "value differs from the answer";
                } else {
                    c.reason = "answer does not parse";
                }
            } else {
                c.residual = 0.0;
                c.pass = true;
            }
        } catch (const Error& e) {
            c.reason = e.what();
        }
        report.add(std::move(c));
    }
    if (!report.overall) report.rejected_stage = Stage::geometric;
    return report;
}

std::vector<std::string> zero_value_expressions(const core::Predicate& p) {
    using K = core::PredicateKind;
    const auto& a = p.args;
    auto call = [](std::string_view fn, std::initializer_list<std::string> args) {
        std::string out(fn);
        out += '(';
        bool first = true;
        for (const auto& x : args) {
            if (!first) out += ", ";
            out += x;
            first = false;
        }
        return out + ')';
    };
    auto len = [&](const std::string& x, const std::string& y) { return call("length", {x, y}); };
    auto lines = [&](std::size_t i) { return call("angle_between_lines", {a[i], a[i + 1], a[i + 2], a[i + 3]}); };

    std::vector<std::string> out;
    switch (p.kind) {
    case K::cong: out.push_back(len(a[0], a[1]) + " - " + len(a[2], a[3])); break;
    case K::perp: out.push_back(lines(0) + " - 90"); break;
    case K::para: out.push_back(lines(0) + " - 0"); break;
    case K::coll:
        for (std::size_t k = 2; k < a.size(); ++k) out.push_back(call("area", {a[0], a[1], a[k]}) + " - 0");
        break;
    case K::midp:
        out.push_back(len(a[0], a[1]) + " - " + len(a[0], a[2]));
        out.push_back(call("area", {a[0], a[1], a[2]}) + " - 0");
        break;
    case K::circle:
        for (std::size_t k = 2; k < a.size(); ++k) out.push_back(len(a[0], a[1]) + " - " + len(a[0], a[k]));
        break;
    case K::cyclic:
        // inscribed angles over chord a0 a1, as undirected line angles
        for (std::size_t k = 3; k < a.size(); ++k)
            out.push_back(call("angle_between_lines", {a[2], a[0], a[2], a[1]}) + " - " +
                          call("angle_between_lines", {a[k], a[0], a[k], a[1]}));
        break;
    case K::eqangle: out.push_back(lines(0) + " - " + lines(4)); break;
    case K::eqratio:
        out.push_back(len(a[0], a[1]) + " / " + len(a[2], a[3]) + " - " + len(a[4], a[5]) + " / " + len(a[6], a[7]));
        break;
    case K::eqratio3:
        out.push_back(len(a[4], a[0]) + " / " + len(a[4], a[2]) + " - " + len(a[5], a[1]) + " / " + len(a[5], a[3]));
        break;
    case K::rconst:
        out.push_back(len(a[0], a[1]) + " / " + len(a[2], a[3]) + " - " + std::to_string(p.constant->num) + " / " +
                      std::to_string(p.constant->den));
        break;
    case K::simtri:
    case K::simtrir:
        out.push_back(len(a[0], a[1]) + " / " + len(a[3], a[4]) + " - " + len(a[1], a[2]) + " / " + len(a[4], a[5]));
        out.push_back(len(a[0], a[1]) + " / " + len(a[3], a[4]) + " - " + len(a[2], a[0]) + " / " + len(a[5], a[3]));
        break;
    case K::contri:
    case K::contrir:
        out.push_back(len(a[0], a[1]) + " - " + len(a[3], a[4]));
        out.push_back(len(a[1], a[2]) + " - " + len(a[4], a[5]));
        out.push_back(len(a[2], a[0]) + " - " + len(a[5], a[3]));
        break;
    default: break;
    }
    return out;
}

VerificationReport verify_record(const RecordCandidate& record, const ToleranceConfig& tol) {
    VerificationReport report;
    const core::Witness w{record.plot_code.points};
    for (const auto& p : record.declared) {
        Check c{"relation", core::to_text(p), std::nullopt, false, ""};
        try {
            const RelationCheck r = check_relation(p, w, tol);
            c.residual = r.residual;
            c.pass = r.pass;
            if (!c.pass) c.reason = "relation does not hold on the coordinates";
        } catch (const Error& e) {
            c.reason = e.what();
        }
        report.add(std::move(c));
    }
    {
        Check c{"distinct_points", "points", 0.0, true, ""};
        const auto& pts = record.plot_code.points;
        double closest = std::numeric_limits<double>::infinity();
        for (auto i = pts.begin(); i != pts.end(); ++i)
            for (auto j = std::next(i); j != pts.end(); ++j) {
                const double d = distance(i->second, j->second);
                if (d < closest) closest = d;
                if (d <= tol.eps_abs && c.pass) {
                    c.pass = false;
                    c.reason = i->first + " and " + j->first + " coincide";
                }
            }
        if (std::isfinite(closest)) c.residual = closest;
        report.add(std::move(c));
    }
    report.merge(check_annotations(record.plot_code, tol));
    if (record.plot_code.quantities.empty()) {
        report.add(Check{"answer", "quantities", std::nullopt, false, "no quantity expressions"});
    } else if (record.kind == ProblemKind::computation && !record.answer) {
        report.add(Check{"answer", "answer", std::nullopt, false, "computation problem without an answer"});
    } else {
        report.merge(verify_answer(record.plot_code.quantities, record.plot_code, record.answer, record.kind, tol));
    }
    report.rejected_stage = report.overall ? std::nullopt : std::optional<Stage>(Stage::geometric);
    return report;
}

}  // namespace geoforge::verify
