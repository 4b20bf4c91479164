#include "geoforge/predicate.hpp"

#include "geoforge/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

namespace geoforge::core {

namespace {

constexpr std::array<std::string_view, kPredicateKindCount> kKindNames = {
    "perp",   "para",     "cong",    "coll",   "ncoll",  "npara",    "cyclic",
    "circle", "midp",     "eqangle", "eqratio", "eqratio3", "rconst", "simtri",
    "simtrir", "contri",  "contrir", "sameside", "nsameside", "sameclock",
};

using Perm = std::vector<std::uint8_t>;

Perm identity(std::size_t n) {
    Perm p(n);
    std::iota(p.begin(), p.end(), std::uint8_t{0});
    return p;
}

Perm swap_positions(std::size_t n, std::initializer_list<std::pair<int, int>> swaps) {
    Perm p = identity(n);
    for (auto [a, b] : swaps) std::swap(p[a], p[b]);
    return p;
}

// compose(a, b)[i] = a[b[i]]: apply b's rearrangement on top of a's.
Perm compose(const Perm& a, const Perm& b) {
    Perm out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[b[i]];
    return out;
}

std::vector<Perm> close_group(std::size_t n, const std::vector<Perm>& generators) {
    std::set<Perm> seen{identity(n)};
    std::vector<Perm> frontier{identity(n)};
    while (!frontier.empty()) {
        std::vector<Perm> next;
        for (const Perm& g : frontier) {
            for (const Perm& gen : generators) {
                Perm h = compose(g, gen);
                if (seen.insert(h).second) next.push_back(std::move(h));
            }
        }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

std::vector<Perm> generators_for(PredicateKind kind, std::size_t n) {
    using K = PredicateKind;
    switch (kind) {
    case K::perp:
    case K::para:
    case K::npara:
    case K::cong:
        return {swap_positions(4, {{0, 1}}), swap_positions(4, {{2, 3}}),
                Perm{2, 3, 0, 1}};
    case K::circle:
        return {swap_positions(4, {{1, 2}}), swap_positions(4, {{2, 3}})};
    case K::midp:
        return {swap_positions(3, {{1, 2}})};
    case K::eqangle:
    case K::eqratio:
        return {swap_positions(8, {{0, 1}}), swap_positions(8, {{2, 3}}),
                swap_positions(8, {{4, 5}}), swap_positions(8, {{6, 7}}),
                Perm{4, 5, 6, 7, 0, 1, 2, 3}};
    case K::eqratio3:
        // (a b c d m n) ~ (b a d c n m) ~ (c d a b m n)
        return {Perm{1, 0, 3, 2, 5, 4}, Perm{2, 3, 0, 1, 4, 5}};
    case K::rconst:
        return {swap_positions(4, {{0, 1}}), swap_positions(4, {{2, 3}})};
    case K::simtri:
    case K::simtrir:
    case K::contri:
    case K::contrir:
    case K::sameclock:
        // joint relabelling of the vertex correspondence, and triangle swap
        return {Perm{1, 0, 2, 4, 3, 5}, Perm{1, 2, 0, 4, 5, 3}, Perm{3, 4, 5, 0, 1, 2}};
    case K::sameside:
    case K::nsameside:
        return {swap_positions(6, {{1, 2}}), swap_positions(6, {{4, 5}}),
                Perm{3, 4, 5, 0, 1, 2}};
    case K::coll:
    case K::ncoll:
    case K::cyclic: {
        std::vector<Perm> gens;
        for (std::size_t i = 0; i + 1 < n; ++i)
            gens.push_back(swap_positions(n, {{static_cast<int>(i), static_cast<int>(i + 1)}}));
        return gens;
    }
    }
    return {};
}

bool distinct(std::span<const PointLabel> labels) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j)
            if (labels[i] == labels[j]) return false;
    return true;
}

std::pair<PointLabel, PointLabel> sorted_pair(const PointLabel& a, const PointLabel& b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}

std::vector<std::string> split_ws(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

Predicate parse_impl(std::string_view text, bool check_degenerate) {
    auto tokens = split_ws(text);
    if (tokens.empty()) throw InvalidPredicate("empty predicate text");
    auto kind = kind_from_name(tokens.front());
    if (!kind) throw InvalidPredicate("unknown predicate kind '" + tokens.front() + "'");
    Predicate p;
    p.kind = *kind;
    p.args.assign(tokens.begin() + 1, tokens.end());
    if (p.kind == PredicateKind::rconst) {
        if (p.args.empty()) throw InvalidPredicate("rconst needs a ratio");
        p.constant = Rational::parse(p.args.back());
        p.args.pop_back();
    }
    check_arity(p.kind, p.args.size(), p.constant.has_value());
    if (check_degenerate && is_degenerate(p))
        throw InvalidPredicate("degenerate predicate '" + std::string(text) + "'");
    return p;
}

}  // namespace

std::string_view kind_name(PredicateKind kind) {
    return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<PredicateKind> kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == name) return static_cast<PredicateKind>(i);
    return std::nullopt;
}

bool is_nondegeneracy_kind(PredicateKind kind) {
    using K = PredicateKind;
    return kind == K::ncoll || kind == K::npara || kind == K::sameside ||
           kind == K::nsameside || kind == K::sameclock;
}

bool is_fully_symmetric(PredicateKind kind) {
    using K = PredicateKind;
    return kind == K::coll || kind == K::ncoll || kind == K::cyclic;
}

Rational Rational::make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw InvalidPredicate("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return {num, den};
}

Rational Rational::parse(std::string_view text) {
    auto to_int = [&](std::string_view s) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
            throw InvalidPredicate("malformed rational '" + std::string(text) + "'");
        return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return make(to_int(text), 1);
    return make(to_int(text.substr(0, slash)), to_int(text.substr(slash + 1)));
}

std::string Rational::to_string() const {
    return std::to_string(num) + "/" + std::to_string(den);
}

void check_arity(PredicateKind kind, std::size_t n, bool has_constant) {
    using K = PredicateKind;
    bool ok = false;
    switch (kind) {
    case K::perp:
    case K::para:
    case K::npara:
    case K::cong:
    case K::circle:
        ok = n == 4;
        break;
    case K::coll:
    case K::midp:
        ok = n == 3;
        break;
    case K::ncoll:
        ok = n >= 3;  // r04 uses four points: not all on one line
        break;
    case K::cyclic:
        ok = n >= 4;
        break;
    case K::eqangle:
    case K::eqratio:
        ok = n == 8;
        break;
    case K::eqratio3:
    case K::simtri:
    case K::simtrir:
    case K::contri:
    case K::contrir:
    case K::sameside:
    case K::nsameside:
    case K::sameclock:
        ok = n == 6;
        break;
    case K::rconst:
        ok = n == 4;
        break;
    }
    if (!ok)
        throw InvalidPredicate(std::string(kind_name(kind)) + " does not take " +
                               std::to_string(n) + " arguments");
    if ((kind == K::rconst) != has_constant)
        throw InvalidPredicate(kind == K::rconst ? "rconst requires a ratio constant"
                                                 : "only rconst carries a constant");
}

bool is_degenerate(const Predicate& p) {
    using K = PredicateKind;
    const auto& a = p.args;
    std::span<const PointLabel> all(a);
    switch (p.kind) {
    case K::perp:
    case K::para:
    case K::npara:
    case K::cong:
        return a[0] == a[1] || a[2] == a[3] || sorted_pair(a[0], a[1]) == sorted_pair(a[2], a[3]);
    case K::coll:
    case K::ncoll:
    case K::cyclic:
    case K::circle:
    case K::midp:
        return !distinct(all);
    case K::eqangle:
    case K::eqratio: {
        for (int i = 0; i < 8; i += 2)
            if (a[i] == a[i + 1]) return true;
        const auto l0 = sorted_pair(a[0], a[1]);
        const auto l1 = sorted_pair(a[2], a[3]);
        const auto l2 = sorted_pair(a[4], a[5]);
        const auto l3 = sorted_pair(a[6], a[7]);
        if (l0 == l2 && l1 == l3) return true;  // X = X
        if (l0 == l1 && l2 == l3) return true;  // both sides trivially equal
        return false;
    }
    case K::eqratio3:
        return a[0] == a[1] || a[2] == a[3] || a[4] == a[0] || a[4] == a[2] || a[5] == a[1] ||
               a[5] == a[3];
    case K::rconst:
        return a[0] == a[1] || a[2] == a[3] || !p.constant || p.constant->num <= 0;
    case K::simtri:
    case K::simtrir:
    case K::contri:
    case K::contrir:
        return !distinct(all.subspan(0, 3)) || !distinct(all.subspan(3, 3)) ||
               std::equal(a.begin(), a.begin() + 3, a.begin() + 3);
    case K::sameside:
    case K::nsameside:
    case K::sameclock:
        return !distinct(all.subspan(0, 3)) || !distinct(all.subspan(3, 3));
    }
    return false;
}

Predicate make_predicate(PredicateKind kind, std::vector<PointLabel> args,
                         std::optional<Rational> constant) {
    Predicate p{kind, std::move(args), constant};
    check_arity(kind, p.args.size(), constant.has_value());
    if (is_degenerate(p)) throw InvalidPredicate("degenerate predicate '" + to_text(p) + "'");
    return p;
}

const std::vector<std::vector<std::uint8_t>>& symmetry_group(PredicateKind kind, std::size_t arity) {
    static std::mutex mu;
    static std::map<std::pair<PredicateKind, std::size_t>, std::vector<Perm>> cache;
    std::lock_guard lock(mu);
    auto key = std::pair{kind, arity};
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, close_group(arity, generators_for(kind, arity))).first;
    return it->second;
}

Predicate canonicalize(const Predicate& p) {
    check_arity(p.kind, p.args.size(), p.constant.has_value());
    Predicate best = p;
    if (is_fully_symmetric(p.kind)) {
        std::sort(best.args.begin(), best.args.end());
        return best;
    }
    // Compare rearrangements in place; only the winner is materialized.
    const auto& group = symmetry_group(p.kind, p.args.size());
    const Perm* winner = nullptr;
    for (const Perm& perm : group) {
        if (!winner) {
            winner = &perm;
            continue;
        }
        for (std::size_t i = 0; i < perm.size(); ++i) {
            const int c = p.args[perm[i]].compare(p.args[(*winner)[i]]);
            if (c < 0) winner = &perm;
            if (c != 0) break;
        }
    }
    for (std::size_t i = 0; i < winner->size(); ++i) best.args[i] = p.args[(*winner)[i]];
    return best;
}

std::vector<Predicate> symmetric_variants(const Predicate& p) {
    check_arity(p.kind, p.args.size(), p.constant.has_value());
    std::set<std::vector<PointLabel>> seen;
    std::vector<Predicate> out;
    auto emit = [&](std::vector<PointLabel> args) {
        if (seen.insert(args).second) out.push_back(Predicate{p.kind, std::move(args), p.constant});
    };
    if (is_fully_symmetric(p.kind)) {
        std::vector<PointLabel> args = p.args;
        std::sort(args.begin(), args.end());
        do emit(args);
        while (std::next_permutation(args.begin(), args.end()));
        return out;
    }
    for (const Perm& perm : symmetry_group(p.kind, p.args.size())) {
        std::vector<PointLabel> args(perm.size());
        for (std::size_t i = 0; i < perm.size(); ++i) args[i] = p.args[perm[i]];
        emit(std::move(args));
    }
    return out;
}

std::string to_text(const Predicate& p) {
    std::string out(kind_name(p.kind));
    for (const auto& a : p.args) {
        out += ' ';
        out += a;
    }
    if (p.constant) {
        out += ' ';
        out += p.constant->to_string();
    }
    return out;
}

Predicate parse_predicate(std::string_view text) { return parse_impl(text, true); }

Predicate parse_pattern(std::string_view text) { return parse_impl(text, false); }

}  // namespace geoforge::core
