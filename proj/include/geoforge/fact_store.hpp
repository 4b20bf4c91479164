#pragma once

#include "geoforge/predicate.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace geoforge::core {

/// Variable name (without the leading '?') to point label.
using Substitution = std::map<std::string, PointLabel>;

/// One argument of a pattern: either a fixed label or a variable slot.
struct Term {
    bool is_variable = false;
    int slot = -1;         // variables only
    PointLabel label;      // constants only
};

/// Pattern compiled against a slot table. Variants enumerate the kind's
/// symmetry group so matching against canonical facts is positional.
struct CompiledPattern {
    PredicateKind kind = PredicateKind::coll;
    std::vector<Term> terms;
    std::vector<std::vector<Term>> variants;
    std::optional<Rational> constant;
};

/// Maps variable names to dense slots; shared by all patterns of one rule.
class SlotTable {
public:
    int slot_of(const std::string& name);
    int find(const std::string& name) const;
    std::size_t size() const { return names_.size(); }
    const std::string& name(int slot) const { return names_[slot]; }

private:
    std::vector<std::string> names_;
};

/// `as_variables` treats every argument as a variable (rule patterns);
/// otherwise only arguments starting with '?' are variables.
CompiledPattern compile_pattern(const Predicate& pattern, SlotTable& slots, bool as_variables);

/// Binding of slots to labels; an empty string means unbound.
using Binding = std::vector<PointLabel>;

/// Restricts matches to facts (or cyclic sets) whose round lies in [lo, hi].
struct RoundWindow {
    int lo = std::numeric_limits<int>::min();
    int hi = std::numeric_limits<int>::max();

    bool contains(int round) const { return round >= lo && round <= hi; }
};

/// Where a match landed: a stored fact, or a merged concyclic set.
struct MatchHit {
    PredicateKind kind = PredicateKind::coll;
    std::size_t index = 0;  // fact index within kind, or cyclic set index
};

/// Canonical fact storage with per-position indices and union-merged
/// concyclic sets. Single writer, many readers.
class FactStore {
public:
    struct StoredFact {
        Predicate fact;
        int tag = -1;
        int round = 0;
    };

    struct CyclicSet {
        std::vector<PointLabel> points;  // sorted
        std::vector<std::pair<int, Predicate>> contributors;  // (tag, inserted fact)
        int round = 0;  // last round in which the set grew
    };

    /// Inserts a (canonicalized) fact. Returns true iff the store changed.
    /// Non-degeneracy kinds are rejected with InvalidPredicate. Rounds must
    /// be non-decreasing across calls.
    bool insert(const Predicate& p, int tag = -1, int round = 0);

    /// Symmetry-insensitive membership (cyclic: all labels in one merged set).
    bool contains(const Predicate& p) const;
    /// As contains, for a fact already in canonical form.
    bool contains_canonical(const Predicate& p) const;

    std::size_t size() const;
    std::span<const StoredFact> facts(PredicateKind kind) const;
    std::span<const CyclicSet> cyclic_sets() const { return cyclic_; }
    std::vector<Predicate> all_facts() const;

    /// Every substitution whose canonicalized instantiation is stored, sorted.
    std::vector<Substitution> match(const Predicate& pattern) const;

    /// Enumerates matches of `pattern` consistent with `binding`. The
    /// binding is extended in place for the duration of each callback.
    template <class OnMatch>
    void match_compiled(const CompiledPattern& pattern, Binding& binding, OnMatch&& on_match,
                        RoundWindow window = {}) const;

    /// Tags of the cyclic facts that justify `labels` lying on set `set_index`.
    std::vector<int> cyclic_support(std::size_t set_index, std::span<const PointLabel> labels) const;

    /// Round in which the matched fact or set last changed.
    int hit_round(const MatchHit& hit) const;
    int hit_tag(const MatchHit& hit) const;

private:
    using PostingIndex = std::unordered_map<PointLabel, std::vector<std::size_t>>;

    static PointLabel pair_key(const PointLabel& a, const PointLabel& b) { return a + '\x1f' + b; }

    template <class OnMatch>
    void match_variant(const CompiledPattern& pattern, const std::vector<Term>& terms,
                       Binding& binding, OnMatch& on_match, RoundWindow window) const;
    template <class OnMatch>
    void match_cyclic(const CompiledPattern& pattern, Binding& binding, OnMatch& on_match,
                      RoundWindow window) const;

    std::array<std::vector<StoredFact>, kPredicateKindCount> facts_;
    std::array<std::vector<PostingIndex>, kPredicateKindCount> postings_;
    // Keyed by the labels at positions (2i, 2i+1), i.e. one line or segment.
    std::array<std::vector<PostingIndex>, kPredicateKindCount> pair_postings_;
    std::set<Predicate> present_;
    std::vector<CyclicSet> cyclic_;
};

// ---------------------------------------------------------------------------

template <class OnMatch>
void FactStore::match_compiled(const CompiledPattern& pattern, Binding& binding,
                               OnMatch&& on_match, RoundWindow window) const {
    if (pattern.kind == PredicateKind::cyclic) {
        match_cyclic(pattern, binding, on_match, window);
        return;
    }
    for (const auto& variant : pattern.variants)
        match_variant(pattern, variant, binding, on_match, window);
}

template <class OnMatch>
void FactStore::match_variant(const CompiledPattern& pattern, const std::vector<Term>& terms,
                              Binding& binding, OnMatch& on_match,
                              RoundWindow window) const {
    const auto kind_index = static_cast<std::size_t>(pattern.kind);
    const auto& stored = facts_[kind_index];
    if (stored.empty()) return;

    auto value_at = [&](const Term& t) -> const PointLabel* {
        if (!t.is_variable) return &t.label;
        const PointLabel& b = binding[t.slot];
        return b.empty() ? nullptr : &b;
    };

    // Narrow candidates through the smallest posting list of a bound position.
    const std::vector<std::size_t>* candidates = nullptr;
    const auto& postings = postings_[kind_index];
    for (std::size_t pos = 0; pos < terms.size() && pos < postings.size(); ++pos) {
        const PointLabel* v = value_at(terms[pos]);
        if (!v) continue;
        auto it = postings[pos].find(*v);
        if (it == postings[pos].end()) return;
        if (!candidates || it->second.size() < candidates->size()) candidates = &it->second;
    }
    const auto& pairs = pair_postings_[kind_index];
    for (std::size_t i = 0; i < pairs.size() && 2 * i + 1 < terms.size(); ++i) {
        const PointLabel* a = value_at(terms[2 * i]);
        const PointLabel* b = value_at(terms[2 * i + 1]);
        if (!a || !b) continue;
        auto it = pairs[i].find(pair_key(*a, *b));
        if (it == pairs[i].end()) return;
        if (it->second.size() < candidates->size()) candidates = &it->second;
    }

    std::vector<int> newly_bound;
    newly_bound.reserve(terms.size());
    auto try_fact = [&](std::size_t fact_index) {
        const StoredFact& sf = stored[fact_index];
        if (!window.contains(sf.round)) return;
        if (sf.fact.args.size() != terms.size()) return;
        if (pattern.constant && sf.fact.constant != pattern.constant) return;
        newly_bound.clear();
        bool ok = true;
        for (std::size_t pos = 0; pos < terms.size() && ok; ++pos) {
            const Term& t = terms[pos];
            const PointLabel& label = sf.fact.args[pos];
            if (!t.is_variable) {
                ok = t.label == label;
            } else if (binding[t.slot].empty()) {
                binding[t.slot] = label;
                newly_bound.push_back(t.slot);
            } else {
                ok = binding[t.slot] == label;
            }
        }
        if (ok) on_match(MatchHit{pattern.kind, fact_index});
        for (int slot : newly_bound) binding[slot].clear();
    };

    if (candidates) {
        for (std::size_t idx : *candidates) try_fact(idx);
    } else {
        // Facts are appended in round order, so the window is a contiguous range.
        auto first = std::partition_point(stored.begin(), stored.end(),
                                          [&](const StoredFact& f) { return f.round < window.lo; });
        for (auto idx = static_cast<std::size_t>(first - stored.begin()); idx < stored.size(); ++idx) {
            if (stored[idx].round > window.hi) break;
            try_fact(idx);
        }
    }
}

template <class OnMatch>
void FactStore::match_cyclic(const CompiledPattern& pattern, Binding& binding,
                             OnMatch& on_match, RoundWindow window) const {
    const auto& terms = pattern.terms;
    for (std::size_t set_index = 0; set_index < cyclic_.size(); ++set_index) {
        if (!window.contains(cyclic_[set_index].round)) continue;
        const auto& points = cyclic_[set_index].points;
        auto member = [&](const PointLabel& l) {
            return std::binary_search(points.begin(), points.end(), l);
        };
        bool feasible = true;
        std::vector<int> free_slots;
        for (const Term& t : terms) {
            if (!t.is_variable) {
                feasible = feasible && member(t.label);
            } else if (!binding[t.slot].empty()) {
                feasible = feasible && member(binding[t.slot]);
            } else if (std::find(free_slots.begin(), free_slots.end(), t.slot) == free_slots.end()) {
                free_slots.push_back(t.slot);
            }
        }
        if (!feasible) continue;

        auto enough_distinct = [&] {
            std::vector<const PointLabel*> seen;
            for (const Term& t : terms) {
                const PointLabel* v = t.is_variable ? &binding[t.slot] : &t.label;
                if (std::none_of(seen.begin(), seen.end(), [&](auto* s) { return *s == *v; }))
                    seen.push_back(v);
            }
            return seen.size() >= 4;
        };

        // Free variables range over the set; repeats are allowed as long as
        // the instantiated pattern names at least four distinct points.
        auto assign = [&](auto&& self, std::size_t k) -> void {
            if (k == free_slots.size()) {
                if (enough_distinct()) on_match(MatchHit{PredicateKind::cyclic, set_index});
                return;
            }
            for (const auto& p : points) {
                binding[free_slots[k]] = p;
                self(self, k + 1);
            }
            binding[free_slots[k]].clear();
        };
        assign(assign, 0);
    }
}

}  // namespace geoforge::core
