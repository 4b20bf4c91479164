#pragma once

#include "geoforge/fact_store.hpp"
#include "geoforge/predicate.hpp"
#include "geoforge/scene.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace geoforge::deduction {

using core::Predicate;
using core::PredicateKind;
using core::Witness;

struct Rule {
    std::string id;    // "r06"
    std::string name;  // "Base of half triangle"
    std::vector<Predicate> premises;     // patterns; every argument is a variable
    std::vector<Predicate> conclusions;  // patterns
};

/// Parses blocks of `rNN Name` / `premises => conclusions`. Rules whose id is
/// in `excluded` are skipped without being parsed. Throws RuleLibraryError.
std::vector<Rule> parse_rules(std::string_view text, const std::set<std::string>& excluded = {});

/// The embedded library text, verbatim.
std::string_view embedded_rule_text();

/// Parsed embedded library, minus r57 (no predicate-level form exists).
const std::vector<Rule>& load_rule_library();

const Rule* find_rule(const std::vector<Rule>& rules, std::string_view id);

struct ChainBudget {
    int max_facts = 2000;
    int max_rounds = 12;
};

struct ChainOptions {
    ChainBudget budget;
    /// Drop conclusions that fail numerically on the witness (tolerance 1e-6).
    bool numeric_guard = true;
};

/// One rule firing: premise nodes plus the side-conditions it discharged.
struct Application {
    std::string rule_id;
    std::vector<int> premise_nodes;
    std::vector<Predicate> side_conditions;
    int conclusion_node = -1;
};

struct Node {
    Predicate fact;  // canonical
    bool given = false;
    int producer = -1;  // application index, -1 for given nodes
    int round = 0;
};

struct DeductionGraph {
    std::vector<Node> nodes;
    std::vector<Application> applications;
    bool truncated = false;
    int rounds = 0;
    /// Conclusions the numeric guard refused, as (rule id, fact).
    std::vector<std::pair<std::string, Predicate>> rejected;

    /// Node whose fact canonically equals `p`, or -1.
    int node_of(const Predicate& p) const;
    std::size_t derived_count() const;
};

/// Applies rules to fixpoint (or budget). Rules fire in library order;
/// non-degeneracy premises are checked on the witness. Deterministic.
DeductionGraph forward_chain(const std::vector<Predicate>& given, const Witness& w,
                             const std::vector<Rule>& rules, const ChainOptions& options = {});

struct ProofStep {
    std::string rule_id;
    std::vector<Predicate> inputs;
    Predicate output;

    bool operator==(const ProofStep&) const = default;
};

struct ProofTrace {
    Predicate target;
    std::vector<Predicate> premises;  // given leaves of the target's ancestor cone, sorted
    std::vector<ProofStep> steps;     // topological order, last outputs target
};

struct Subgoal {
    Predicate target;
    ProofTrace trace;
};

/// One entry per derived node, in node order.
std::vector<Subgoal> extract_subgoals(const DeductionGraph& g);

inline const std::set<std::string>& default_definitional_rules() {
    static const std::set<std::string> rules{"r51", "r54", "r55", "r56"};
    return rules;
}

/// Drops targets that restate a premise, need no steps, or follow only from
/// definitional rules.
std::vector<Subgoal> filter_trivial(const std::vector<Subgoal>& subgoals,
                                    const std::set<std::string>& definitional = default_definitional_rules());

/// Uniform sample of at most `budget` subgoals, original order preserved.
std::vector<Subgoal> sample_subgoals(const std::vector<Subgoal>& subgoals, std::size_t budget,
                                     std::uint64_t rng_seed);

struct SeedData {
    std::vector<Predicate> premises;
    std::vector<ProofStep> steps;
    std::vector<Predicate> targets;
    Witness witness;
};

/// Indices of the subgoals in the top ceil(rho * n) by premise count and by
/// step count, in premise-ranking order. Throws ConfigError for rho outside
/// (0, 1].
std::vector<std::size_t> select_indices(const std::vector<Subgoal>& subgoals, double rho);

/// Keeps subgoals in the top ceil(rho * n) by premise count and by step count
/// (both descending, ties by canonical target order); returns the
/// intersection in premise-ranking order. Throws ConfigError for rho outside (0, 1].
std::vector<SeedData> select_seeds(const std::vector<Subgoal>& subgoals, double rho,
                                   const Witness& witness);

/// English rendering of a single predicate, e.g. "AB ∥ CD".
std::string describe(const Predicate& p);

struct SeedText {
    std::string premise_text;
    std::vector<std::string> step_texts;
    std::string target_text;
};

/// "by <rule name>, <inputs> give <output>" per step. Throws TemplateError
/// when a step names a rule missing from `rules`.
SeedText translate_seed(const SeedData& seed, const std::vector<Rule>& rules = load_rule_library());

}  // namespace geoforge::deduction
