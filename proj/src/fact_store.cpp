#include "geoforge/fact_store.hpp"

#include "geoforge/errors.hpp"

#include <algorithm>

namespace geoforge::core {

int SlotTable::slot_of(const std::string& name) {
    const int found = find(name);
    if (found >= 0) return found;
    names_.push_back(name);
    return static_cast<int>(names_.size()) - 1;
}

int SlotTable::find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

CompiledPattern compile_pattern(const Predicate& pattern, SlotTable& slots, bool as_variables) {
    check_arity(pattern.kind, pattern.args.size(), pattern.constant.has_value());
    CompiledPattern out;
    out.kind = pattern.kind;
    out.constant = pattern.constant;
    for (const auto& arg : pattern.args) {
        Term t;
        if (as_variables || (!arg.empty() && arg.front() == '?')) {
            t.is_variable = true;
            t.slot = slots.slot_of(as_variables ? arg : arg.substr(1));
        } else {
            t.label = arg;
        }
        out.terms.push_back(std::move(t));
    }
    if (pattern.kind == PredicateKind::cyclic) return out;

    // Distinct rearrangements of the pattern under the kind's symmetry group.
    auto key = [](const std::vector<Term>& terms) {
        std::vector<std::pair<int, std::string>> k;
        for (const auto& t : terms) k.emplace_back(t.is_variable ? t.slot : -1, t.label);
        return k;
    };
    std::set<std::vector<std::pair<int, std::string>>> seen;
    const bool full = is_fully_symmetric(pattern.kind);
    std::vector<std::vector<std::uint8_t>> perms;
    if (full) {
        std::vector<std::uint8_t> p(out.terms.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<std::uint8_t>(i);
        do perms.push_back(p);
        while (std::next_permutation(p.begin(), p.end()));
    } else {
        perms = symmetry_group(pattern.kind, out.terms.size());
    }
    for (const auto& perm : perms) {
        std::vector<Term> v(perm.size());
        for (std::size_t i = 0; i < perm.size(); ++i) v[i] = out.terms[perm[i]];
        if (seen.insert(key(v)).second) out.variants.push_back(std::move(v));
    }
    return out;
}

bool FactStore::insert(const Predicate& raw, int tag, int round) {
    if (is_nondegeneracy_kind(raw.kind))
        throw InvalidPredicate("non-degeneracy predicates are not stored: " + to_text(raw));
    Predicate p = canonicalize(raw);

    if (p.kind == PredicateKind::cyclic) {
        std::vector<std::size_t> touching;
        for (std::size_t i = 0; i < cyclic_.size(); ++i) {
            const auto& pts = cyclic_[i].points;
            const bool covers = std::all_of(p.args.begin(), p.args.end(), [&](const auto& l) {
                return std::binary_search(pts.begin(), pts.end(), l);
            });
            if (covers) return false;
            const bool shares = std::any_of(p.args.begin(), p.args.end(), [&](const auto& l) {
                return std::binary_search(pts.begin(), pts.end(), l);
            });
            if (shares) touching.push_back(i);
        }
        CyclicSet merged;
        merged.points = p.args;
        merged.round = round;
        for (std::size_t i : touching) {
            auto& s = cyclic_[i];
            merged.points.insert(merged.points.end(), s.points.begin(), s.points.end());
            merged.contributors.insert(merged.contributors.end(), s.contributors.begin(),
                                       s.contributors.end());
        }
        merged.contributors.emplace_back(tag, p);
        std::sort(merged.points.begin(), merged.points.end());
        merged.points.erase(std::unique(merged.points.begin(), merged.points.end()),
                            merged.points.end());
        // Erase merged sets back to front, then keep the list ordered by
        // smallest member so iteration order does not depend on history.
        for (auto it = touching.rbegin(); it != touching.rend(); ++it)
            cyclic_.erase(cyclic_.begin() + static_cast<std::ptrdiff_t>(*it));
        cyclic_.push_back(std::move(merged));
        std::sort(cyclic_.begin(), cyclic_.end(),
                  [](const CyclicSet& a, const CyclicSet& b) { return a.points < b.points; });
        return true;
    }

    if (!present_.insert(p).second) return false;
    const auto k = static_cast<std::size_t>(p.kind);
    auto& postings = postings_[k];
    if (postings.size() < p.args.size()) postings.resize(p.args.size());
    const std::size_t index = facts_[k].size();
    for (std::size_t pos = 0; pos < p.args.size(); ++pos) postings[pos][p.args[pos]].push_back(index);
    auto& pairs = pair_postings_[k];
    if (pairs.size() < p.args.size() / 2) pairs.resize(p.args.size() / 2);
    for (std::size_t pos = 0; pos + 1 < p.args.size(); pos += 2)
        pairs[pos / 2][pair_key(p.args[pos], p.args[pos + 1])].push_back(index);
    facts_[k].push_back(StoredFact{std::move(p), tag, round});
    return true;
}

bool FactStore::contains(const Predicate& raw) const {
    if (raw.kind == PredicateKind::cyclic) {
        return std::any_of(cyclic_.begin(), cyclic_.end(), [&](const CyclicSet& s) {
            return std::all_of(raw.args.begin(), raw.args.end(), [&](const auto& l) {
                return std::binary_search(s.points.begin(), s.points.end(), l);
            });
        });
    }
    return present_.count(canonicalize(raw)) > 0;
}

bool FactStore::contains_canonical(const Predicate& p) const {
    if (p.kind == PredicateKind::cyclic) return contains(p);
    return present_.count(p) > 0;
}

std::size_t FactStore::size() const { return present_.size() + cyclic_.size(); }

std::span<const FactStore::StoredFact> FactStore::facts(PredicateKind kind) const {
    return facts_[static_cast<std::size_t>(kind)];
}

std::vector<Predicate> FactStore::all_facts() const {
    std::vector<Predicate> out(present_.begin(), present_.end());
    for (const auto& s : cyclic_) out.push_back(Predicate{PredicateKind::cyclic, s.points, {}});
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Substitution> FactStore::match(const Predicate& pattern) const {
    SlotTable slots;
    const CompiledPattern compiled = compile_pattern(pattern, slots, false);
    Binding binding(slots.size());
    std::set<Substitution> found;
    match_compiled(compiled, binding, [&](const MatchHit&) {
        Substitution s;
        for (std::size_t i = 0; i < slots.size(); ++i) s[slots.name(static_cast<int>(i))] = binding[i];
        found.insert(std::move(s));
    });
    return {found.begin(), found.end()};
}

std::vector<int> FactStore::cyclic_support(std::size_t set_index,
                                           std::span<const PointLabel> labels) const {
    const auto& set = cyclic_.at(set_index);
    for (const auto& [tag, fact] : set.contributors) {
        const bool covers = std::all_of(labels.begin(), labels.end(), [&](const auto& l) {
            return std::find(fact.args.begin(), fact.args.end(), l) != fact.args.end();
        });
        if (covers) return {tag};
    }
    std::vector<int> tags;
    for (const auto& [tag, fact] : set.contributors) tags.push_back(tag);
    return tags;
}

int FactStore::hit_round(const MatchHit& hit) const {
    if (hit.kind == PredicateKind::cyclic) return cyclic_.at(hit.index).round;
    return facts_[static_cast<std::size_t>(hit.kind)].at(hit.index).round;
}

int FactStore::hit_tag(const MatchHit& hit) const {
    if (hit.kind == PredicateKind::cyclic) return -1;
    return facts_[static_cast<std::size_t>(hit.kind)].at(hit.index).tag;
}

}  // namespace geoforge::core
