#include "geoforge/deduction.hpp"

#include "geoforge/errors.hpp"
#include "geoforge/relation.hpp"
#include "geoforge/resources.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

namespace geoforge::deduction {

using core::Binding;
using core::CompiledPattern;
using core::FactStore;
using core::MatchHit;
using core::RoundWindow;
using core::SlotTable;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<Predicate> parse_pattern_list(const std::string& text, const std::string& rule_id) {
    std::vector<Predicate> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const std::string t = trim(part);
        if (t.empty()) throw RuleLibraryError(rule_id + ": empty predicate in rule body");
        try {
            out.push_back(core::parse_pattern(t));
        } catch (const Error& e) {
            throw RuleLibraryError(rule_id + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

std::vector<Rule> parse_rules(std::string_view text, const std::set<std::string>& excluded) {
    std::vector<std::string> lines;
    {
        std::stringstream ss{std::string(text)};
        std::string line;
        while (std::getline(ss, line)) {
            std::string t = trim(line);
            if (!t.empty()) lines.push_back(std::move(t));
        }
    }
    std::vector<Rule> rules;
    for (std::size_t i = 0; i < lines.size(); i += 2) {
        const std::string& header = lines[i];
        const auto space = header.find(' ');
        if (header.size() < 2 || header[0] != 'r' || space == std::string::npos)
            throw RuleLibraryError("malformed rule header '" + header + "'");
        Rule rule;
        rule.id = header.substr(0, space);
        rule.name = trim(std::string_view(header).substr(space + 1));
        if (i + 1 >= lines.size()) throw RuleLibraryError(rule.id + ": missing rule body");
        const std::string& body = lines[i + 1];
        const auto arrow = body.find("=>");
        if (arrow == std::string::npos) throw RuleLibraryError(rule.id + ": body lacks '=>'");
        if (excluded.count(rule.id)) continue;

        rule.premises = parse_pattern_list(body.substr(0, arrow), rule.id);
        rule.conclusions = parse_pattern_list(body.substr(arrow + 2), rule.id);
        std::set<std::string> bound;
        for (const auto& p : rule.premises) bound.insert(p.args.begin(), p.args.end());
        for (const auto& c : rule.conclusions)
            for (const auto& a : c.args)
                if (!bound.count(a))
                    throw RuleLibraryError(rule.id + ": conclusion variable '" + a +
                                           "' is not bound by a premise");
        if (std::none_of(rule.premises.begin(), rule.premises.end(),
                         [](const Predicate& p) { return !core::is_nondegeneracy_kind(p.kind); }))
            throw RuleLibraryError(rule.id + ": no storable premise");
        rules.push_back(std::move(rule));
    }
    return rules;
}

std::string_view embedded_rule_text() { return embedded_resource("rules.txt"); }

const std::vector<Rule>& load_rule_library() {
    static const std::vector<Rule> rules = parse_rules(embedded_rule_text(), {"r57"});
    return rules;
}

const Rule* find_rule(const std::vector<Rule>& rules, std::string_view id) {
    for (const auto& r : rules)
        if (r.id == id) return &r;
    return nullptr;
}

int DeductionGraph::node_of(const Predicate& p) const {
    const Predicate c = core::canonicalize(p);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].fact == c) return static_cast<int>(i);
    return -1;
}

std::size_t DeductionGraph::derived_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return !n.given; }));
}

// ---------------------------------------------------------------------------
// Forward chaining

namespace {

struct CompiledRule {
    const Rule* rule = nullptr;
    std::size_t slot_count = 0;
    std::vector<CompiledPattern> stored;       // premises kept in the store
    std::vector<CompiledPattern> conditions;   // non-degeneracy premises
    std::vector<CompiledPattern> conclusions;
    // plans[k]: premise order when stored premise k carries the new facts,
    // with the conditions that become fully bound after each step.
    struct Plan {
        std::vector<std::size_t> order;
        std::vector<std::vector<std::size_t>> checks_after;
    };
    std::vector<Plan> plans;
    // Slot pairs that can be exchanged without changing any instantiated
    // fact up to symmetry; matches keep only label(first) <= label(second).
    std::vector<std::pair<int, int>> interchangeable;
};

std::vector<int> slots_of(const CompiledPattern& p) {
    std::vector<int> out;
    for (const auto& t : p.terms)
        if (t.is_variable && std::find(out.begin(), out.end(), t.slot) == out.end()) out.push_back(t.slot);
    return out;
}

// Hypotheses a rule states only implicitly. Pappus needs two distinct base
// lines; without it every triple-wise assignment onto one crowded line
// matches.
const std::map<std::string, std::vector<std::string>>& implicit_conditions() {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"r44", {"ncoll a b p"}},
    };
    return table;
}

bool has_transposition(const CompiledPattern& p, std::size_t i, std::size_t j) {
    if (core::is_fully_symmetric(p.kind)) return true;
    for (const auto& perm : core::symmetry_group(p.kind, p.terms.size())) {
        bool ok = perm[i] == j && perm[j] == i;
        for (std::size_t k = 0; k < perm.size() && ok; ++k)
            if (k != i && k != j) ok = perm[k] == k;
        if (ok) return true;
    }
    return false;
}

// x and y are interchangeable when in every pattern they either both occur
// once, at positions the kind's symmetry group may transpose, or neither
// occurs.
bool interchangeable(const CompiledRule& cr, int x, int y) {
    bool seen = false;
    for (const auto* group : {&cr.stored, &cr.conditions, &cr.conclusions}) {
        for (const auto& p : *group) {
            std::vector<std::size_t> px, py;
            for (std::size_t i = 0; i < p.terms.size(); ++i) {
                if (!p.terms[i].is_variable) continue;
                if (p.terms[i].slot == x) px.push_back(i);
                if (p.terms[i].slot == y) py.push_back(i);
            }
            if (px.empty() && py.empty()) continue;
            if (px.size() != 1 || py.size() != 1 || p.kind == PredicateKind::cyclic) return false;
            if (!has_transposition(p, px[0], py[0])) return false;
            seen = true;
        }
    }
    return seen;
}

CompiledRule compile_rule(const Rule& rule) {
    CompiledRule cr;
    cr.rule = &rule;
    SlotTable slots;
    for (const auto& p : rule.premises) {
        auto c = core::compile_pattern(p, slots, true);
        (core::is_nondegeneracy_kind(p.kind) ? cr.conditions : cr.stored).push_back(std::move(c));
    }
    if (auto it = implicit_conditions().find(rule.id); it != implicit_conditions().end())
        for (const auto& text : it->second)
            cr.conditions.push_back(core::compile_pattern(core::parse_pattern(text), slots, true));
    for (const auto& p : rule.conclusions) cr.conclusions.push_back(core::compile_pattern(p, slots, true));
    cr.slot_count = slots.size();
    std::vector<bool> paired(cr.slot_count, false);
    for (int x = 0; x < static_cast<int>(cr.slot_count); ++x) {
        for (int y = x + 1; y < static_cast<int>(cr.slot_count) && !paired[x]; ++y) {
            if (paired[y] || !interchangeable(cr, x, y)) continue;
            cr.interchangeable.emplace_back(x, y);
            paired[x] = paired[y] = true;
        }
    }

    for (std::size_t k = 0; k < cr.stored.size(); ++k) {
        CompiledRule::Plan plan;
        std::vector<bool> bound(cr.slot_count, false);
        std::vector<bool> used(cr.stored.size(), false);
        std::vector<bool> checked(cr.conditions.size(), false);
        auto take = [&](std::size_t idx) {
            used[idx] = true;
            plan.order.push_back(idx);
            for (int s : slots_of(cr.stored[idx])) bound[s] = true;
            std::vector<std::size_t> ready;
            for (std::size_t c = 0; c < cr.conditions.size(); ++c) {
                if (checked[c]) continue;
                const auto vars = slots_of(cr.conditions[c]);
                if (std::all_of(vars.begin(), vars.end(), [&](int s) { return bound[s]; })) {
                    checked[c] = true;
                    ready.push_back(c);
                }
            }
            plan.checks_after.push_back(std::move(ready));
        };
        // Windows depend on the premise index, not its depth, so any order is
        // sound. A wide cyclic premise goes after something that binds labels;
        // enumerated first it costs |set|^vars.
        std::size_t first = k;
        if (cr.stored[k].kind == PredicateKind::cyclic && slots_of(cr.stored[k]).size() > 4) {
            std::size_t widest = 0;
            for (std::size_t i = 0; i < cr.stored.size(); ++i) {
                if (cr.stored[i].kind == PredicateKind::cyclic) continue;
                const std::size_t n = slots_of(cr.stored[i]).size();
                if (n > widest) {
                    widest = n;
                    first = i;
                }
            }
        }
        take(first);
        while (plan.order.size() < cr.stored.size()) {
            std::size_t best = cr.stored.size();
            int best_score = -1;
            for (std::size_t i = 0; i < cr.stored.size(); ++i) {
                if (used[i]) continue;
                const auto vars = slots_of(cr.stored[i]);
                int score = static_cast<int>(std::count_if(vars.begin(), vars.end(), [&](int s) { return bound[s]; })) * 2;
                if (score > 0 && score / 2 == static_cast<int>(vars.size())) score += 100;  // pure check
                if (cr.stored[i].kind != PredicateKind::cyclic) score += 1;
                if (score > best_score) {
                    best_score = score;
                    best = i;
                }
            }
            take(best);
        }
        cr.plans.push_back(std::move(plan));
    }
    return cr;
}

struct Candidate {
    Predicate fact;
    std::string rule_id;
    std::vector<int> premise_nodes;
    std::vector<Predicate> side_conditions;
};

Predicate instantiate(const CompiledPattern& pattern, const Binding& binding) {
    Predicate p;
    p.kind = pattern.kind;
    p.constant = pattern.constant;
    for (const auto& t : pattern.terms) p.args.push_back(t.is_variable ? binding[t.slot] : t.label);
    return p;
}

class Chainer {
public:
    Chainer(const Witness& w, const ChainOptions& options) : witness_(w), options_(options) {}

    DeductionGraph run(const std::vector<Predicate>& given, const std::vector<Rule>& rules) {
        for (const auto& p : given) {
            if (core::is_nondegeneracy_kind(p.kind)) continue;
            const Predicate c = core::canonicalize(p);
            if (core::is_degenerate(c)) throw InvalidPredicate("degenerate given fact: " + core::to_text(c));
            if (!store_.insert(c, static_cast<int>(graph_.nodes.size()), 0)) continue;
            graph_.nodes.push_back(Node{c, true, -1, 0});
        }
        std::vector<CompiledRule> compiled;
        compiled.reserve(rules.size());
        for (const auto& r : rules) compiled.push_back(compile_rule(r));

        for (int round = 1; round <= options_.budget.max_rounds; ++round) {
            if (at_capacity()) {
                graph_.truncated = true;
                break;
            }
            std::vector<Candidate> candidates;
            emitted_.clear();
            emitted_canonical_.clear();
            for (const auto& cr : compiled) collect(cr, round, candidates);
            graph_.rounds = round;
            bool changed = false;
            for (auto& cand : candidates) {
                if (at_capacity()) {
                    graph_.truncated = true;
                    break;
                }
                changed |= commit(std::move(cand), round);
            }
            if (graph_.truncated || !changed) break;
            if (round == options_.budget.max_rounds) graph_.truncated = true;
        }
        return std::move(graph_);
    }

private:
    bool at_capacity() const {
        return static_cast<int>(graph_.nodes.size()) >= options_.budget.max_facts;
    }

    void collect(const CompiledRule& cr, int round, std::vector<Candidate>& out) {
        Binding binding(cr.slot_count);
        for (std::size_t k = 0; k < cr.plans.size(); ++k) {
            const auto& plan = cr.plans[k];
            std::vector<int> premise_nodes;
            std::vector<Predicate> sides;
            auto step = [&](auto&& self, std::size_t depth) -> void {
                if (depth == plan.order.size()) {
                    emit(cr, binding, premise_nodes, sides, out);
                    return;
                }
                const std::size_t idx = plan.order[depth];
                RoundWindow window;
                if (idx == k) {
                    window = {round - 1, round - 1};
                } else if (idx < k) {
                    window.hi = round - 2;
                } else {
                    window.hi = round - 1;
                }
                if (window.hi < window.lo) return;
                const CompiledPattern& pattern = cr.stored[idx];
                store_.match_compiled(pattern, binding, [&](const MatchHit& hit) {
                    const std::size_t node_mark = premise_nodes.size();
                    const std::size_t side_mark = sides.size();
                    if (hit.kind == PredicateKind::cyclic) {
                        const Predicate inst = instantiate(pattern, binding);
                        for (int tag : store_.cyclic_support(hit.index, inst.args)) premise_nodes.push_back(tag);
                    } else {
                        premise_nodes.push_back(store_.hit_tag(hit));
                    }
                    bool ok = std::none_of(cr.interchangeable.begin(), cr.interchangeable.end(), [&](const auto& xy) {
                        const auto& a = binding[xy.first];
                        const auto& b = binding[xy.second];
                        return !a.empty() && !b.empty() && b < a;
                    });
                    for (std::size_t c : plan.checks_after[depth]) {
                        if (!ok) break;
                        Predicate cond = instantiate(cr.conditions[c], binding);
                        if (core::is_degenerate(cond) || !core::check_nondegenerate(witness_, cond)) {
                            ok = false;
                            break;
                        }
                        sides.push_back(std::move(cond));
                    }
                    if (ok) self(self, depth + 1);
                    premise_nodes.resize(node_mark);
                    sides.resize(side_mark);
                }, window);
            };
            step(step, 0);
        }
    }

    void emit(const CompiledRule& cr, const Binding& binding, const std::vector<int>& premise_nodes,
              const std::vector<Predicate>& sides, std::vector<Candidate>& out) {
        for (const auto& concl : cr.conclusions) {
            // Only the first candidate for a fact can commit in a round.
            if (!concl.constant) {
                key_.assign(1, static_cast<char>(concl.kind));
                for (const auto& t : concl.terms) key_.append(t.is_variable ? binding[t.slot] : t.label).push_back('\x1f');
                if (emitted_.count(key_)) continue;
                emitted_.insert(key_);
            }
            Predicate p = instantiate(concl, binding);
            if (core::is_degenerate(p)) continue;
            p = core::canonicalize(p);
            if (store_.contains_canonical(p) || !emitted_canonical_.insert(p).second) continue;
            std::vector<int> nodes = premise_nodes;
            std::sort(nodes.begin(), nodes.end());
            nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
            out.push_back(Candidate{std::move(p), cr.rule->id, std::move(nodes), sides});
        }
    }

    bool guard_accepts(const Predicate& p) const {
        if (!options_.numeric_guard) return true;
        // Rules hold for directed angles; checking that way also stops
        // undirected coincidences from feeding the angle-chasing rules.
        if (!core::relation_holds(p, witness_, {}, core::AngleMode::directed)) return false;
        if (p.kind != PredicateKind::cyclic) return true;
        // The merged set must itself be concyclic.
        std::vector<core::PointLabel> merged = p.args;
        for (const auto& s : store_.cyclic_sets()) {
            const bool shares = std::any_of(p.args.begin(), p.args.end(), [&](const auto& l) {
                return std::binary_search(s.points.begin(), s.points.end(), l);
            });
            if (shares) merged.insert(merged.end(), s.points.begin(), s.points.end());
        }
        std::sort(merged.begin(), merged.end());
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        return core::relation_holds(Predicate{PredicateKind::cyclic, merged, {}}, witness_);
    }

    bool commit(Candidate cand, int round) {
        if (store_.contains_canonical(cand.fact)) return false;
        if (refused_.count(cand.fact)) return false;
        if (!guard_accepts(cand.fact)) {
            refused_.insert(cand.fact);
            graph_.rejected.emplace_back(cand.rule_id, cand.fact);
            return false;
        }
        const int node = static_cast<int>(graph_.nodes.size());
        store_.insert(cand.fact, node, round);
        const int app = static_cast<int>(graph_.applications.size());
        graph_.applications.push_back(
            Application{cand.rule_id, std::move(cand.premise_nodes), std::move(cand.side_conditions), node});
        graph_.nodes.push_back(Node{std::move(cand.fact), false, app, round});
        return true;
    }

    const Witness& witness_;
    ChainOptions options_;
    FactStore store_;
    DeductionGraph graph_;
    std::set<Predicate> refused_;
    std::unordered_set<std::string> emitted_;  // raw conclusions seen this round
    std::string key_;
    std::set<Predicate> emitted_canonical_;
};

}  // namespace

DeductionGraph forward_chain(const std::vector<Predicate>& given, const Witness& w,
                             const std::vector<Rule>& rules, const ChainOptions& options) {
    if (options.budget.max_facts < 1 || options.budget.max_rounds < 0)
        throw InvalidBudget("chain budget must allow at least one fact");
    return Chainer(w, options).run(given, rules);
}

// ---------------------------------------------------------------------------
// Subgoals

std::vector<Subgoal> extract_subgoals(const DeductionGraph& g) {
    std::vector<Subgoal> out;
    std::vector<char> seen(g.nodes.size());
    for (std::size_t target = 0; target < g.nodes.size(); ++target) {
        if (g.nodes[target].given) continue;
        std::fill(seen.begin(), seen.end(), 0);
        std::vector<int> stack{static_cast<int>(target)};
        std::vector<int> derived;
        std::vector<Predicate> premises;
        while (!stack.empty()) {
            const int n = stack.back();
            stack.pop_back();
            if (seen[n]) continue;
            seen[n] = 1;
            const Node& node = g.nodes[n];
            if (node.given) {
                premises.push_back(node.fact);
                continue;
            }
            derived.push_back(n);
            for (int pn : g.applications[node.producer].premise_nodes) stack.push_back(pn);
        }
        // Node indices follow derivation order, so sorting is a topological order.
        std::sort(derived.begin(), derived.end());
        std::sort(premises.begin(), premises.end());
        ProofTrace trace;
        trace.target = g.nodes[target].fact;
        trace.premises = std::move(premises);
        for (int n : derived) {
            const Application& app = g.applications[g.nodes[n].producer];
            ProofStep s;
            s.rule_id = app.rule_id;
            for (int pn : app.premise_nodes) s.inputs.push_back(g.nodes[pn].fact);
            s.output = g.nodes[n].fact;
            trace.steps.push_back(std::move(s));
        }
        out.push_back(Subgoal{trace.target, std::move(trace)});
    }
    return out;
}

std::vector<Subgoal> filter_trivial(const std::vector<Subgoal>& subgoals,
                                    const std::set<std::string>& definitional) {
    std::vector<Subgoal> out;
    for (const auto& sg : subgoals) {
        const Predicate target = core::canonicalize(sg.target);
        const bool restates = std::any_of(sg.trace.premises.begin(), sg.trace.premises.end(),
                                          [&](const Predicate& p) { return core::canonicalize(p) == target; });
        if (restates || sg.trace.steps.empty()) continue;
        const bool only_definitional =
            std::all_of(sg.trace.steps.begin(), sg.trace.steps.end(),
                        [&](const ProofStep& s) { return definitional.count(s.rule_id) > 0; });
        if (only_definitional) continue;
        out.push_back(sg);
    }
    return out;
}

std::vector<Subgoal> sample_subgoals(const std::vector<Subgoal>& subgoals, std::size_t budget,
                                     std::uint64_t rng_seed) {
    if (subgoals.size() <= budget) return subgoals;
    core::SceneRng rng(rng_seed);
    std::vector<std::size_t> idx(subgoals.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < budget; ++i) {
        const std::size_t j = i + rng.index(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(budget);
    std::sort(idx.begin(), idx.end());
    std::vector<Subgoal> out;
    out.reserve(budget);
    for (std::size_t i : idx) out.push_back(subgoals[i]);
    return out;
}

std::vector<std::size_t> select_indices(const std::vector<Subgoal>& subgoals, double rho) {
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
    const std::size_t n = subgoals.size();
    if (n == 0) return {};
    const auto keep = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(n) - 1e-9));

    auto ranking = [&](auto count) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const std::size_t ca = count(subgoals[a]);
            const std::size_t cb = count(subgoals[b]);
            if (ca != cb) return ca > cb;
            return subgoals[a].target < subgoals[b].target;
        });
        order.resize(std::max<std::size_t>(keep, 1));
        return order;
    };
    const auto by_premises = ranking([](const Subgoal& s) { return s.trace.premises.size(); });
    const auto by_steps = ranking([](const Subgoal& s) { return s.trace.steps.size(); });
    const std::set<std::size_t> step_top(by_steps.begin(), by_steps.end());

    std::vector<std::size_t> out;
    for (std::size_t i : by_premises)
        if (step_top.count(i)) out.push_back(i);
    return out;
}

std::vector<SeedData> select_seeds(const std::vector<Subgoal>& subgoals, double rho,
                                   const Witness& witness) {
    std::vector<SeedData> out;
    for (std::size_t i : select_indices(subgoals, rho)) {
        const auto& sg = subgoals[i];
        out.push_back(SeedData{sg.trace.premises, sg.trace.steps, {sg.target}, witness});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text

namespace {

std::string seg(const Predicate& p, std::size_t i) { return p.args[i] + p.args[i + 1]; }

std::string list_points(const std::vector<core::PointLabel>& pts, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        if (i > from) out += ", ";
        out += pts[i];
    }
    return out;
}

std::string tri(const Predicate& p, std::size_t i) { return "△" + p.args[i] + p.args[i + 1] + p.args[i + 2]; }

}  // namespace

std::string describe(const Predicate& p) {
    using K = PredicateKind;
    const auto& a = p.args;
    switch (p.kind) {
    case K::perp: return seg(p, 0) + " ⊥ " + seg(p, 2);
    case K::para: return seg(p, 0) + " ∥ " + seg(p, 2);
    case K::npara: return seg(p, 0) + " ∦ " + seg(p, 2);
    case K::cong: return seg(p, 0) + " = " + seg(p, 2);
    case K::coll: return list_points(a, 0, 3) + " are collinear";
    case K::ncoll: return list_points(a, 0, 3) + " are not collinear";
    case K::cyclic: return list_points(a, 0, a.size()) + " are concyclic";
    case K::circle: return a[0] + " is the center of the circle through " + list_points(a, 1, 4);
    case K::midp: return a[0] + " is the midpoint of " + seg(p, 1);
    case K::eqangle: return "∠(" + seg(p, 0) + "," + seg(p, 2) + ") = ∠(" + seg(p, 4) + "," + seg(p, 6) + ")";
    case K::eqratio: return seg(p, 0) + "/" + seg(p, 2) + " = " + seg(p, 4) + "/" + seg(p, 6);
    case K::eqratio3:
        return a[4] + a[0] + "/" + a[4] + a[2] + " = " + a[5] + a[1] + "/" + a[5] + a[3];
    case K::rconst: return seg(p, 0) + "/" + seg(p, 2) + " = " + p.constant->to_string();
    case K::simtri: return tri(p, 0) + " ∼ " + tri(p, 3);
    case K::simtrir: return tri(p, 0) + " ∼ " + tri(p, 3) + " (reversed)";
    case K::contri: return tri(p, 0) + " ≅ " + tri(p, 3);
    case K::contrir: return tri(p, 0) + " ≅ " + tri(p, 3) + " (reversed)";
    case K::sameside:
        return a[0] + " lies on the same side of " + a[1] + ", " + a[2] + " as " + a[3] + " of " + a[4] +
               ", " + a[5];
    case K::nsameside:
        return a[0] + " lies on the opposite side of " + a[1] + ", " + a[2] + " from " + a[3] + " of " +
               a[4] + ", " + a[5];
    case K::sameclock: return tri(p, 0) + " and " + tri(p, 3) + " have the same orientation";
    }
    throw TemplateError("no template for predicate kind");
}

namespace {

std::string join(const std::vector<Predicate>& ps, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (i) out += sep;
        out += describe(ps[i]);
    }
    return out;
}

}  // namespace

SeedText translate_seed(const SeedData& seed, const std::vector<Rule>& rules) {
    SeedText out;
    out.premise_text = join(seed.premises, "; ");
    for (const auto& step : seed.steps) {
        const Rule* rule = find_rule(rules, step.rule_id);
        if (!rule) throw TemplateError("unknown rule '" + step.rule_id + "'");
        out.step_texts.push_back("by " + rule->name + ", " + join(step.inputs, " and ") + " give " +
                                 describe(step.output));
    }
    out.target_text = join(seed.targets, "; ");
    return out;
}

}  // namespace geoforge::deduction
