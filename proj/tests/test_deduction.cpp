#include "geoforge/deduction.hpp"
#include "geoforge/errors.hpp"
#include "geoforge/pipeline.hpp"
#include "geoforge/verifier.hpp"

#include "support/rule_fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace geoforge;
using core::parse_predicate;
using core::Predicate;
using deduction::forward_chain;
using deduction::load_rule_library;

namespace {

core::Witness witness_of(const std::map<std::string, Point2>& coords) {
    core::Witness w;
    w.coords = coords;
    return w;
}

std::vector<Predicate> parse_all(const std::vector<std::string>& texts) {
    std::vector<Predicate> out;
    for (const auto& t : texts) out.push_back(parse_predicate(t));
    return out;
}

std::vector<deduction::Rule> only(std::initializer_list<const char*> ids) {
    std::vector<deduction::Rule> out;
    for (const char* id : ids) out.push_back(*deduction::find_rule(load_rule_library(), id));
    return out;
}

std::set<Predicate> facts(const deduction::DeductionGraph& g) {
    std::set<Predicate> out;
    for (const auto& n : g.nodes) out.insert(n.fact);
    return out;
}

}  // namespace

TEST(RuleLibrary, LoadsEveryRuleButPythagoras) {
    const auto& rules = load_rule_library();
    EXPECT_EQ(rules.size(), 64u);
    EXPECT_EQ(deduction::find_rule(rules, "r57"), nullptr);
    const auto* r06 = deduction::find_rule(rules, "r06");
    ASSERT_NE(r06, nullptr);
    EXPECT_EQ(r06->name, "Base of half triangle");
    EXPECT_EQ(r06->premises.size(), 2u);
}

TEST(RuleLibrary, MalformedText) {
    EXPECT_THROW(deduction::parse_rules("r99 Broken\nperp A B C D para A B C D\n"), RuleLibraryError);
    EXPECT_THROW(deduction::parse_rules("r99 Unbound\nperp A B C D => para A B E F\n"), RuleLibraryError);
    EXPECT_THROW(deduction::parse_rules("r99 Only side conditions\nncoll A B C => coll A B C\n"), RuleLibraryError);
}

class RuleFixtureTest : public ::testing::TestWithParam<fixtures::RuleFixture> {};

TEST_P(RuleFixtureTest, FullLibraryReachesConclusion) {
    const auto& f = GetParam();
    const auto g = forward_chain(parse_all(f.given), witness_of(f.coords), load_rule_library());
    EXPECT_GE(g.node_of(parse_predicate(f.conclusion)), 0) << f.rule << ": " << f.conclusion;
}

TEST_P(RuleFixtureTest, NamedRuleAloneFires) {
    const auto& f = GetParam();
    const auto g = forward_chain(parse_all(f.given), witness_of(f.coords), only({f.rule.c_str()}));
    const int node = g.node_of(parse_predicate(f.conclusion));
    ASSERT_GE(node, 0) << f.rule;
    const auto& n = g.nodes[static_cast<std::size_t>(node)];
    ASSERT_GE(n.producer, 0);
    EXPECT_EQ(g.applications[static_cast<std::size_t>(n.producer)].rule_id, f.rule);
}

INSTANTIATE_TEST_SUITE_P(Rules, RuleFixtureTest, ::testing::ValuesIn(fixtures::rule_fixtures()),
                         [](const auto& info) {
                             std::string s = info.param.rule + "_" + std::to_string(info.index);
                             return s;
                         });

TEST(ForwardChain, PappusNeedsTwoLines) {
    // All six points on one line: the degenerate configuration must not fire.
    const auto w = witness_of({{"A", {0, 0}}, {"B", {1, 0}}, {"C", {2, 0}}, {"D", {3, 0}}, {"E", {4, 0}}});
    const auto g = forward_chain(parse_all({"coll A B C", "coll A B D", "coll A B E"}), w, only({"r44"}));
    EXPECT_EQ(g.derived_count(), 0u);
}

TEST(ForwardChain, SideConditionBlocksCollinearWitness) {
    // r00 needs A, B, E non-collinear.
    const auto w = witness_of({{"A", {0, 0}}, {"B", {1, 0}}, {"C", {2, -1}}, {"D", {2, 1}}, {"E", {3, 0}}, {"F", {5, 0}}});
    const auto g = forward_chain(parse_all({"perp A B C D", "perp C D E F"}), w, only({"r00"}));
    EXPECT_LT(g.node_of(parse_predicate("para A B E F")), 0);
}

TEST(ForwardChain, Deterministic) {
    const auto s = core::sample_scene(9, {});
    const auto a = forward_chain(s.predicates, s.witness, load_rule_library());
    const auto b = forward_chain(s.predicates, s.witness, load_rule_library());
    ASSERT_EQ(a.nodes.size(), b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) EXPECT_EQ(a.nodes[i].fact, b.nodes[i].fact);
    ASSERT_EQ(a.applications.size(), b.applications.size());
    for (std::size_t i = 0; i < a.applications.size(); ++i) {
        EXPECT_EQ(a.applications[i].rule_id, b.applications[i].rule_id);
        EXPECT_EQ(a.applications[i].premise_nodes, b.applications[i].premise_nodes);
    }
    const auto sa = deduction::extract_subgoals(a);
    const auto sb = deduction::extract_subgoals(b);
    ASSERT_EQ(sa.size(), sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) EXPECT_EQ(sa[i].target, sb[i].target);
}

TEST(ForwardChain, Monotone) {
    const auto w = witness_of({{"A", {0, 3}}, {"B", {0, 0}}, {"C", {4, 0}}, {"M", {2, 1.5}}, {"N", {2, 0}}});
    const auto base = parse_all({"perp A B B C", "midp M A C"});
    auto more = base;
    more.push_back(parse_predicate("midp N B C"));
    const auto small = facts(forward_chain(base, w, load_rule_library()));
    const auto large = facts(forward_chain(more, w, load_rule_library()));
    for (const auto& f : small) EXPECT_TRUE(large.count(f)) << core::to_text(f);
}

// Renaming points must not change the closure. Label order drives the
// pruning of interchangeable rule variables, so reversing it exercises both
// sides of every pair.
TEST(ForwardChain, ClosureInvariantUnderRelabeling) {
    auto check = [](const std::vector<Predicate>& given, const std::map<std::string, Point2>& coords) {
        std::vector<std::string> labels;
        for (const auto& [l, p] : coords) labels.push_back(l);
        std::map<std::string, std::string> to, back;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const std::string renamed = "P" + std::to_string(labels.size() - i);
            to[labels[i]] = renamed;
            back[renamed] = labels[i];
        }
        auto rename = [](Predicate p, const std::map<std::string, std::string>& m) {
            for (auto& a : p.args) a = m.at(a);
            return core::canonicalize(p);
        };
        std::vector<Predicate> given2;
        std::map<std::string, Point2> coords2;
        for (const auto& g : given) given2.push_back(rename(g, to));
        for (const auto& [l, p] : coords) coords2[to.at(l)] = p;
        const auto a = forward_chain(given, witness_of(coords), load_rule_library());
        const auto b = forward_chain(given2, witness_of(coords2), load_rule_library());
        ASSERT_LT(a.nodes.size(), static_cast<std::size_t>(deduction::ChainOptions{}.budget.max_facts));
        std::set<Predicate> mapped;
        for (const auto& f : facts(b)) mapped.insert(rename(f, back));
        EXPECT_EQ(mapped, facts(a));
    };
    for (const auto& f : fixtures::rule_fixtures())
        if (f.rule == "r09" || f.rule == "r58") check(parse_all(f.given), f.coords);
    for (std::uint64_t seed : {9u, 23u, 41u}) {
        const auto s = core::sample_scene(seed, {});
        check(s.predicates, s.witness.coords);
    }
}

TEST(ForwardChain, BudgetTruncates) {
    const auto s = core::sample_scene(17, {});
    deduction::ChainOptions opts;
    opts.budget.max_facts = static_cast<int>(s.predicates.size()) + 3;
    const auto g = forward_chain(s.predicates, s.witness, load_rule_library(), opts);
    EXPECT_TRUE(g.truncated);
    EXPECT_LE(g.nodes.size(), static_cast<std::size_t>(opts.budget.max_facts));
}

TEST(ForwardChain, DerivedFactsHoldOnWitness) {
    core::Tolerance loose{1e-4, 1e-4, 1e-9};
    int scenes = 0;
    for (std::uint64_t seed = 100; scenes < 50; ++seed) {
        core::Scene s;
        try {
            s = core::sample_scene(seed, {});
        } catch (const SamplingFailed&) {
            continue;
        }
        ++scenes;
        const auto g = forward_chain(s.predicates, s.witness, load_rule_library());
        for (const auto& n : g.nodes)
            EXPECT_TRUE(verify::check_relation(n.fact, s.witness, loose).pass)
                << "seed " << seed << ": " << core::to_text(n.fact);
    }
}

TEST(Subgoals, SingleApplication) {
    const auto w = witness_of({{"A", {0, 4}}, {"B", {-2, 0}}, {"C", {3, 0}}, {"E", {-1, 2}}, {"F", {1.5, 2}}});
    const auto g = forward_chain(parse_all({"midp E A B", "midp F A C"}), w, only({"r06"}));
    const auto subs = deduction::extract_subgoals(g);
    ASSERT_EQ(subs.size(), 1u);
    EXPECT_EQ(subs[0].target, core::canonicalize(parse_predicate("para E F B C")));
    EXPECT_EQ(subs[0].trace.steps.size(), 1u);
    EXPECT_EQ(subs[0].trace.premises.size(), 2u);
}

TEST(Subgoals, ChainedTrace) {
    // r19 gives MA = MB, then r13 turns that into equal base angles.
    const auto w = witness_of({{"A", {0, 3}}, {"B", {0, 0}}, {"C", {4, 0}}, {"M", {2, 1.5}}});
    const auto given = parse_all({"perp A B B C", "midp M A C"});
    const auto g = forward_chain(given, w, only({"r19", "r13"}));
    const auto subs = deduction::extract_subgoals(g);
    const auto it = std::find_if(subs.begin(), subs.end(), [](const auto& s) { return s.trace.steps.size() == 2; });
    ASSERT_NE(it, subs.end());
    EXPECT_EQ(it->trace.steps[0].rule_id, "r19");
    EXPECT_EQ(it->trace.steps[1].rule_id, "r13");
    EXPECT_EQ(it->trace.steps.back().output, it->target);
    std::vector<Predicate> expected;
    for (const auto& p : given) expected.push_back(core::canonicalize(p));
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(it->trace.premises, expected);
}

TEST(Subgoals, GivenOnlyGraph) {
    const auto w = witness_of({{"A", {0, 0}}, {"B", {1, 0}}, {"C", {0, 1}}, {"D", {1, 1}}});
    const auto g = forward_chain(parse_all({"para A B C D"}), w, only({"r06"}));
    EXPECT_TRUE(deduction::extract_subgoals(g).empty());
}

TEST(Subgoals, TraceReplaysFromPremises) {
    const auto s = core::sample_scene(3, {});
    const auto g = forward_chain(s.predicates, s.witness, load_rule_library());
    const auto subs = deduction::extract_subgoals(g);
    ASSERT_FALSE(subs.empty());
    for (std::size_t i = 0; i < subs.size(); i += std::max<std::size_t>(1, subs.size() / 10)) {
        const auto& tr = subs[i].trace;
        std::set<Predicate> known(tr.premises.begin(), tr.premises.end());
        for (const auto& step : tr.steps) {
            for (const auto& in : step.inputs) EXPECT_TRUE(known.count(in)) << core::to_text(in);
            known.insert(step.output);
        }
        const auto replay = forward_chain(tr.premises, s.witness, load_rule_library());
        EXPECT_GE(replay.node_of(subs[i].target), 0) << core::to_text(subs[i].target);
    }
}

TEST(FilterTrivial, RestatedPremise) {
    deduction::Subgoal sg;
    sg.target = core::canonicalize(parse_predicate("para A B C D"));
    sg.trace.target = sg.target;
    sg.trace.premises = {core::canonicalize(parse_predicate("para C D A B"))};
    sg.trace.steps = {{"r02", sg.trace.premises, sg.target}};
    EXPECT_TRUE(deduction::filter_trivial({sg}).empty());
}

TEST(FilterTrivial, DefinitionalOnly) {
    const auto w = witness_of({{"A", {0, 0}}, {"B", {2, 0}}, {"M", {1, 0}}});
    const auto g = forward_chain(parse_all({"midp M A B"}), w, load_rule_library());
    const auto kept = deduction::filter_trivial(deduction::extract_subgoals(g));
    const auto cong = core::canonicalize(parse_predicate("cong M A M B"));
    EXPECT_GE(g.node_of(cong), 0);
    for (const auto& s : kept) EXPECT_NE(s.target, cong);
}

TEST(FilterTrivial, KeepsMixedTrace) {
    const auto w = witness_of({{"A", {0, 3}}, {"B", {0, 0}}, {"C", {4, 0}}, {"M", {2, 1.5}}});
    const auto g = forward_chain(parse_all({"perp A B B C", "midp M A C"}), w, only({"r19", "r13", "r55"}));
    const auto kept = deduction::filter_trivial(deduction::extract_subgoals(g));
    EXPECT_TRUE(std::any_of(kept.begin(), kept.end(), [](const auto& s) { return s.trace.steps.size() >= 2; }));
}

namespace {

deduction::Subgoal synthetic(int premises, int steps, int tag) {
    deduction::Subgoal s;
    // Distinct, ordered targets: tag decides the canonical order.
    const std::string a(1, static_cast<char>('A' + tag));
    s.target = core::canonicalize(parse_predicate(("cong " + a + " Z Y X").c_str()));
    for (int i = 0; i < premises; ++i)
        s.trace.premises.push_back(parse_predicate(("coll P Q " + std::string(1, static_cast<char>('A' + i))).c_str()));
    for (int i = 0; i < steps; ++i) s.trace.steps.push_back({"r00", {}, s.target});
    s.trace.target = s.target;
    return s;
}

// Sort-and-intersect reference with the same tie-break (target order).
std::vector<std::size_t> oracle_select(const std::vector<std::pair<int, int>>& counts, double rho) {
    const std::size_t n = counts.size();
    const auto keep = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(n) - 1e-9));
    std::vector<std::size_t> byp(n), bys(n);
    for (std::size_t i = 0; i < n; ++i) byp[i] = bys[i] = i;
    std::sort(byp.begin(), byp.end(), [&](auto a, auto b) {
        return counts[a].first != counts[b].first ? counts[a].first > counts[b].first : a < b;
    });
    std::sort(bys.begin(), bys.end(), [&](auto a, auto b) {
        return counts[a].second != counts[b].second ? counts[a].second > counts[b].second : a < b;
    });
    std::set<std::size_t> top_steps(bys.begin(), bys.begin() + static_cast<long>(keep));
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < keep; ++k)
        if (top_steps.count(byp[k])) out.push_back(byp[k]);
    return out;
}

}  // namespace

TEST(SelectSeeds, MatchesSortAndIntersectOracle) {
    const std::vector<std::pair<int, int>> counts = {{5, 9}, {5, 2}, {4, 8}, {3, 7}, {3, 3},
                                                     {2, 6}, {2, 2}, {1, 5}, {1, 4}, {1, 1}};
    std::vector<deduction::Subgoal> subs;
    for (std::size_t i = 0; i < counts.size(); ++i)
        subs.push_back(synthetic(counts[i].first, counts[i].second, static_cast<int>(i)));
    const auto got = deduction::select_indices(subs, 0.4);
    EXPECT_EQ(got, oracle_select(counts, 0.4));
    EXPECT_EQ(got, (std::vector<std::size_t>{0, 2, 3}));
}

TEST(SelectSeeds, RhoOneKeepsAll) {
    std::vector<deduction::Subgoal> subs;
    for (int i = 0; i < 6; ++i) subs.push_back(synthetic(i % 3 + 1, 5 - i, i));
    EXPECT_EQ(deduction::select_seeds(subs, 1.0, {}).size(), subs.size());
}

TEST(SelectSeeds, SingleSubgoalAlwaysKept) {
    for (double rho : {0.01, 0.2, 1.0}) EXPECT_EQ(deduction::select_seeds({synthetic(2, 1, 0)}, rho, {}).size(), 1u);
}

TEST(SelectSeeds, RejectsBadRho) {
    EXPECT_THROW(deduction::select_seeds({synthetic(2, 1, 0)}, 0.0, {}), ConfigError);
    EXPECT_THROW(deduction::select_seeds({synthetic(2, 1, 0)}, 1.5, {}), ConfigError);
}

TEST(Translate, PredicateTemplates) {
    EXPECT_EQ(deduction::describe(parse_predicate("para E F B C")), "EF ∥ BC");
    EXPECT_EQ(deduction::describe(parse_predicate("perp A B C D")), "AB ⊥ CD");
    EXPECT_EQ(deduction::describe(parse_predicate("midp M A B")), "M is the midpoint of AB");
    EXPECT_EQ(deduction::describe(parse_predicate("eqangle A B A C D E D F")), "∠(AB,AC) = ∠(DE,DF)");
}

TEST(Translate, StepNamesTheRule) {
    const auto w = witness_of({{"A", {0, 4}}, {"B", {-2, 0}}, {"C", {3, 0}}, {"E", {-1, 2}}, {"F", {1.5, 2}}});
    const auto g = forward_chain(parse_all({"midp E A B", "midp F A C"}), w, only({"r06"}));
    const auto subs = deduction::extract_subgoals(g);
    const auto seeds = deduction::select_seeds(subs, 1.0, w);
    ASSERT_EQ(seeds.size(), 1u);
    const auto text = deduction::translate_seed(seeds[0]);
    ASSERT_EQ(text.step_texts.size(), 1u);
    EXPECT_EQ(text.step_texts[0],
              "by Base of half triangle, E is the midpoint of AB and F is the midpoint of AC give BC ∥ EF");
    // Conclusions are stored canonically, so the text follows canonical order.
    EXPECT_EQ(text.target_text, "BC ∥ EF");
    // Seed text carries no coordinates.
    EXPECT_EQ(text.premise_text.find_first_of("0123456789"), std::string::npos);
}

TEST(Translate, UnknownRule) {
    deduction::SeedData s;
    s.targets = {parse_predicate("para A B C D")};
    s.steps = {{"r99", {}, s.targets[0]}};
    EXPECT_THROW(deduction::translate_seed(s), TemplateError);
}
