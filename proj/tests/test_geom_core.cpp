#include "geoforge/errors.hpp"
#include "geoforge/fact_store.hpp"
#include "geoforge/predicate.hpp"
#include "geoforge/relation.hpp"
#include "geoforge/scene.hpp"
#include "geoforge/verifier.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace geoforge;
using core::canonicalize;
using core::parse_predicate;
using core::Predicate;
using core::PredicateKind;

namespace {

Predicate P(const char* text) { return parse_predicate(text); }

core::Witness witness(std::initializer_list<std::pair<const std::string, Point2>> pts) {
    core::Witness w;
    w.coords = pts;
    return w;
}

}  // namespace

TEST(Canonicalize, PairwiseSymmetry) { EXPECT_EQ(canonicalize(P("cong B A D C")), P("cong A B C D")); }

TEST(Canonicalize, FullPermutationSymmetry) { EXPECT_EQ(canonicalize(P("coll C A B")), P("coll A B C")); }

TEST(Canonicalize, PairSwapSymmetry) {
    EXPECT_EQ(canonicalize(P("eqangle E F G H A B C D")), P("eqangle A B C D E F G H"));
}

TEST(Canonicalize, IdempotentOverRandomPermutations) {
    std::mt19937_64 rng(5);
    const std::vector<std::string> kinds = {"perp A B C D",    "para A B C D",    "cong A B C D",
                                            "eqangle A B C D E F G H", "eqratio A B C D E F G H",
                                            "simtri A B C D E F", "contri A B C D E F", "midp M A B",
                                            "cyclic A B C D",  "circle O A B C",  "coll A B C"};
    for (const auto& text : kinds) {
        const Predicate p = P(text.c_str());
        const Predicate c = canonicalize(p);
        EXPECT_EQ(canonicalize(c), c) << text;
        for (const auto& v : core::symmetric_variants(p)) EXPECT_EQ(canonicalize(v), c) << text;
    }
}

TEST(Canonicalize, PermutationOutsideGroupDiffers) {
    // Swapping the endpoints of only one side changes nothing for cong, but
    // mixing sides across the two segments must.
    EXPECT_NE(canonicalize(P("cong A C B D")), canonicalize(P("cong A B C D")));
    EXPECT_NE(canonicalize(P("midp A M B")), canonicalize(P("midp M A B")));
    EXPECT_NE(canonicalize(P("simtri A B C D F E")), canonicalize(P("simtri A B C D E F")));
}

TEST(Predicate, ArityAndDegeneracy) {
    EXPECT_THROW(parse_predicate("perp A B C"), InvalidPredicate);
    EXPECT_THROW(parse_predicate("para A B A B"), InvalidPredicate);
    EXPECT_THROW(parse_predicate("frob A B"), InvalidPredicate);
    EXPECT_THROW(parse_predicate("rconst A B C D"), InvalidPredicate);
    const Predicate r = P("rconst M A A B 1/2");
    ASSERT_TRUE(r.constant);
    EXPECT_EQ(r.constant->num, 1);
    EXPECT_EQ(r.constant->den, 2);
    EXPECT_EQ(core::to_text(r), "rconst M A A B 1/2");
}

TEST(Predicate, TextRoundTrip) {
    for (const char* t : {"perp A B C D", "eqratio3 A B C D M N", "sameclock A B C P Q R", "ncoll A B C"})
        EXPECT_EQ(core::to_text(P(t)), t);
}

TEST(FactStore, InsertIsIdempotent) {
    core::FactStore s;
    EXPECT_TRUE(s.insert(canonicalize(P("para A B C D"))));
    EXPECT_FALSE(s.insert(canonicalize(P("para A B C D"))));
    EXPECT_TRUE(s.insert(canonicalize(P("cong A B C D"))));
    EXPECT_FALSE(s.insert(canonicalize(P("cong B A D C"))));
}

TEST(FactStore, CyclicSetsMergeOnSharedTriple) {
    core::FactStore s;
    s.insert(canonicalize(P("cyclic A B C D")));
    s.insert(canonicalize(P("cyclic A B C E")));
    ASSERT_EQ(s.cyclic_sets().size(), 1u);
    EXPECT_EQ(s.cyclic_sets()[0].points, (std::vector<std::string>{"A", "B", "C", "D", "E"}));
    EXPECT_TRUE(s.contains(P("cyclic B C D E")));
}

TEST(FactStore, NondegeneracyKindsAreNotStored) {
    core::FactStore s;
    EXPECT_THROW(s.insert(P("ncoll A B C")), InvalidPredicate);
}

TEST(FactStore, MatchBindsVariables) {
    core::FactStore s;
    s.insert(canonicalize(P("para A B C D")));
    const auto subs = s.match(core::parse_pattern("para ?x ?y C D"));
    ASSERT_FALSE(subs.empty());
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& m : subs) pairs.insert({m.at("x"), m.at("y")});
    EXPECT_TRUE(pairs.count({"A", "B"}));
    EXPECT_TRUE(pairs.count({"B", "A"}));
    EXPECT_EQ(s.match(core::parse_pattern("para ?x ?y C D")), subs);  // deterministic
}

TEST(FactStore, MatchOnEmptyStore) {
    core::FactStore s;
    EXPECT_TRUE(s.match(core::parse_pattern("perp ?a ?b ?c ?d")).empty());
}

TEST(FactStore, CyclicMatchCoversEveryFourSubset) {
    core::FactStore s;
    s.insert(canonicalize(P("cyclic A B C D")));
    s.insert(canonicalize(P("cyclic A B C E")));
    std::set<std::set<std::string>> subsets;
    for (const auto& m : s.match(core::parse_pattern("cyclic ?p ?q ?r ?s"))) {
        std::set<std::string> pts{m.at("p"), m.at("q"), m.at("r"), m.at("s")};
        if (pts.size() == 4) subsets.insert(pts);
    }
    // Brute force: every 4-subset of {A..E}.
    std::set<std::set<std::string>> expected;
    const std::vector<std::string> all{"A", "B", "C", "D", "E"};
    for (int mask = 0; mask < 32; ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != 4) continue;
        std::set<std::string> pts;
        for (int i = 0; i < 5; ++i)
            if (mask & (1 << i)) pts.insert(all[static_cast<std::size_t>(i)]);
        expected.insert(pts);
    }
    EXPECT_EQ(subsets, expected);
}

TEST(FactStore, MatchAgreesWithBruteForce) {
    core::FactStore s;
    for (const char* t : {"perp A B C D", "perp A C B D", "perp E F G H", "para A B E F"})
        s.insert(canonicalize(P(t)));
    const std::vector<std::string> labels{"A", "B", "C", "D", "E", "F", "G", "H"};
    std::set<std::vector<std::string>> brute;
    for (const auto& a : labels)
        for (const auto& b : labels)
            for (const auto& c : labels) {
                const Predicate cand{PredicateKind::perp, {a, b, c, "D"}, {}};
                if (core::is_degenerate(cand)) continue;
                if (s.contains(cand)) brute.insert({a, b, c});
            }
    std::set<std::vector<std::string>> matched;
    for (const auto& m : s.match(core::parse_pattern("perp ?a ?b ?c D"))) matched.insert({m.at("a"), m.at("b"), m.at("c")});
    EXPECT_EQ(matched, brute);
}

TEST(Nondegenerate, Ncoll) {
    const auto w = witness({{"A", {0, 0}}, {"B", {1, 0}}, {"C", {0, 1}}, {"D", {2, 0}}});
    EXPECT_TRUE(core::check_nondegenerate(w, P("ncoll A B C")));
    EXPECT_FALSE(core::check_nondegenerate(w, P("ncoll A B D")));
}

TEST(Nondegenerate, SameclockReversedIsFalse) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 50; ++i) {
        const Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        if (std::abs(orient(a, b, c)) < 1e-3) continue;
        const auto w = witness({{"A", a}, {"B", b}, {"C", c}});
        EXPECT_FALSE(core::check_nondegenerate(w, P("sameclock A B C A C B")));
        EXPECT_TRUE(core::check_nondegenerate(w, P("sameclock A B C B C A")));
    }
}

TEST(Nondegenerate, MissingLabel) {
    const auto w = witness({{"A", {0, 0}}, {"B", {1, 0}}});
    EXPECT_THROW(core::check_nondegenerate(w, P("ncoll A B C")), UnknownPoint);
}

TEST(Relation, Examples) {
    const auto w = witness({{"A", {0, 1}}, {"B", {0, 0}}, {"C", {1, 0}}});
    const auto r = verify::check_relation(P("perp A B B C"), w);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.residual, 0.0, 1e-12);

    const auto flat = witness({{"A", {0, 0}}, {"B", {1, 0}}, {"C", {2, 1e-3}}});
    EXPECT_FALSE(verify::check_relation(P("coll A B C"), flat).pass);

    const auto c = witness({{"A", {0, 0}}, {"B", {3, 4}}, {"C", {10, 0}}, {"D", {15 + 1e-8, 0}}});
    EXPECT_TRUE(verify::check_relation(P("cong A B C D"), c).pass);
}

TEST(SampleScene, Deterministic) {
    const auto a = core::sample_scene(42, {});
    const auto b = core::sample_scene(42, {});
    EXPECT_EQ(a.witness, b.witness);
    EXPECT_EQ(a.predicates, b.predicates);
}

TEST(SampleScene, RejectsTinyBudget) { EXPECT_THROW(core::sample_scene(1, {2, 0}), InvalidBudget); }

TEST(SampleScene, EmittedPredicatesHoldOnWitness) {
    int scenes = 0;
    for (std::uint64_t seed = 0; scenes < 100; ++seed) {
        core::Scene s;
        try {
            s = core::sample_scene(seed, {});
        } catch (const SamplingFailed&) {
            continue;
        }
        ++scenes;
        for (const auto& p : s.predicates)
            EXPECT_TRUE(verify::check_relation(p, s.witness).pass) << "seed " << seed << ": " << core::to_text(p);
    }
}

TEST(SampleScene, MidpointConstructionEmitsMidp) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        core::Scene s;
        try {
            s = core::sample_scene(seed, {});
        } catch (const SamplingFailed&) {
            continue;
        }
        for (const auto& step : s.log) {
            if (step.name != "midpoint") continue;
            const Predicate m = canonicalize(Predicate{PredicateKind::midp, {step.output, step.inputs[0], step.inputs[1]}, {}});
            EXPECT_NE(std::find(s.predicates.begin(), s.predicates.end(), m), s.predicates.end());
            const Predicate coll{PredicateKind::coll, {step.output, step.inputs[0], step.inputs[1]}, {}};
            EXPECT_TRUE(verify::check_relation(coll, s.witness).pass);
            return;
        }
    }
    FAIL() << "no midpoint construction in 50 seeds";
}
