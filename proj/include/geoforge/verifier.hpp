#pragma once

#include "geoforge/plot_code.hpp"
#include "geoforge/predicate.hpp"
#include "geoforge/relation.hpp"
#include "geoforge/scene.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geoforge::verify {

using ToleranceConfig = core::Tolerance;

/// Throws ConfigError unless every tolerance is positive.
void validate(const ToleranceConfig& tol);

enum class Stage { semantic, geometric, plotting, image };
std::string_view stage_name(Stage s);
std::optional<Stage> stage_from_name(std::string_view name);

struct Check {
    std::string kind;     // "relation", "length_of_line", "answer", ...
    std::string subject;  // predicate text, label tuple or expression
    std::optional<double> residual;  // absent when the check could not be evaluated
    bool pass = false;
    std::string reason;
};

struct VerificationReport {
    std::vector<Check> checks;
    bool overall = true;
    std::optional<Stage> rejected_stage;

    void add(Check c);
    void merge(const VerificationReport& other);
    nlohmann::ordered_json to_json() const;
    static VerificationReport from_json(const nlohmann::json& j);
};

struct RelationCheck {
    bool pass = false;
    double residual = 0.0;
};

/// Throws UnknownPoint.
RelationCheck check_relation(const core::Predicate& p, const core::Witness& w,
                             const ToleranceConfig& tol = {});

VerificationReport check_annotations(const schema::PlotCode& pc, const ToleranceConfig& tol = {});

enum class ProblemKind { computation, proof };
std::string_view kind_name(ProblemKind k);
ProblemKind problem_kind_from_name(std::string_view name);

/// Computation: every expression evaluates and the first one equals the
/// answer. Proof: every expression is zero. Both compare strictly below
/// max(eps_abs, eps_rel * |answer|). Throws ConfigError when `quantities` is
/// empty or a computation has no answer.
VerificationReport verify_answer(const std::vector<std::string>& quantities, const schema::PlotCode& pc,
                                 const std::optional<std::string>& answer, ProblemKind kind,
                                 const ToleranceConfig& tol = {});

/// Difference expressions that vanish exactly when `p` holds, e.g.
/// "length(A, B) - length(C, D)" for cong A B C D. Empty for the
/// non-degeneracy kinds, which have no equality form.
std::vector<std::string> zero_value_expressions(const core::Predicate& p);

struct RecordCandidate {
    schema::PlotCode plot_code;
    std::vector<core::Predicate> declared;  // relations the problem states
    std::optional<std::string> answer;
    ProblemKind kind = ProblemKind::computation;
};

/// Declared relations, distinct coordinates, annotations, then the answer.
/// Any failure marks the report as rejected at the geometric stage.
VerificationReport verify_record(const RecordCandidate& record, const ToleranceConfig& tol = {});

}  // namespace geoforge::verify
