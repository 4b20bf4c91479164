#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geoforge::core {

/// Point names ("A", "M1"). Rule patterns reuse the same type for variables.
using PointLabel = std::string;

enum class PredicateKind : std::uint8_t {
    perp,
    para,
    cong,
    coll,
    ncoll,
    npara,
    cyclic,
    circle,
    midp,
    eqangle,
    eqratio,
    eqratio3,
    rconst,
    simtri,
    simtrir,
    contri,
    contrir,
    sameside,
    nsameside,
    sameclock,
};

inline constexpr std::size_t kPredicateKindCount = 20;

std::string_view kind_name(PredicateKind kind);
std::optional<PredicateKind> kind_from_name(std::string_view name);

/// ncoll, npara, sameside, nsameside and sameclock. These are never stored;
/// rule side-conditions of these kinds are checked against a witness.
bool is_nondegeneracy_kind(PredicateKind kind);

/// Exact positive-or-negative rational p/q with q > 0 and gcd(p, q) = 1.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t num, std::int64_t den);
    /// Parses "p/q" or an integer "p".
    static Rational parse(std::string_view text);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;

    auto operator<=>(const Rational&) const = default;
};

struct Predicate {
    PredicateKind kind = PredicateKind::coll;
    std::vector<PointLabel> args;
    std::optional<Rational> constant;  // rconst only

    auto operator<=>(const Predicate&) const = default;
    bool operator==(const Predicate&) const = default;
};

/// Throws InvalidPredicate if the argument count does not fit the kind.
void check_arity(PredicateKind kind, std::size_t arg_count, bool has_constant);

/// True when the predicate repeats labels in a way its kind forbids, or is
/// trivially true by construction (e.g. `para A B A B`, `cong A B A B`).
bool is_degenerate(const Predicate& p);

/// Validated constructor: arity and degeneracy are checked (InvalidPredicate).
Predicate make_predicate(PredicateKind kind, std::vector<PointLabel> args,
                         std::optional<Rational> constant = std::nullopt);

/// Argument-position permutations under which a predicate of this kind and
/// arity keeps its meaning. Element `perm` maps to args'[i] = args[perm[i]].
/// Not provided for the fully symmetric kinds (coll, ncoll, cyclic), which
/// canonicalize by sorting.
const std::vector<std::vector<std::uint8_t>>& symmetry_group(PredicateKind kind, std::size_t arity);

bool is_fully_symmetric(PredicateKind kind);

/// Lexicographically least representative under the kind's symmetry group.
Predicate canonicalize(const Predicate& p);

/// Every distinct argument arrangement equivalent to `p` (including p itself).
std::vector<Predicate> symmetric_variants(const Predicate& p);

/// `kind a b c d`, rconst with a trailing `p/q`.
std::string to_text(const Predicate& p);

/// Inverse of to_text. Validates arity and degeneracy.
Predicate parse_predicate(std::string_view text);

/// Same as parse_predicate but without the degeneracy check (rule patterns).
Predicate parse_pattern(std::string_view text);

}  // namespace geoforge::core
