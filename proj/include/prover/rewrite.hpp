#pragma once

#include <optional>
#include <vector>

#include "prover/term.hpp"

namespace prover {

// An oriented rewrite lhs -> rhs whose variables are patterns binding
// arbitrary subterms (consistently). Built from Iff theorem statements.
struct RewriteRule {
    Term lhs;
    Term rhs;
};

// A fact "this subterm is known true/false", derived from assumptions or
// implication antecedents.
struct Fact {
    Term term;
    bool value;
};

// Decompose a known-true term into facts: the term itself; conjuncts,
// recursively; x := false for a top-level negation ~x.
void collect_facts(const Term& t, std::vector<Fact>& out);

// Bottom-up normalization to fixpoint under the built-in boolean rules plus
// `rules`. Every applied rewrite consumes one unit of fuel; returns nullopt
// when fuel runs out. When use_imp_context is set, the consequent of each
// implication is additionally rewritten under its antecedent's facts (and
// the antecedent under the consequent's negation is NOT assumed — only the
// forward direction, which preserves equivalence).
class Rewriter {
public:
    Rewriter(std::vector<RewriteRule> rules, long fuel, bool use_imp_context)
        : rules_(std::move(rules)), fuel_(fuel), imp_context_(use_imp_context) {}

    std::optional<Term> normalize(const Term& t) { return normalize(t, {}); }
    std::optional<Term> normalize(const Term& t, const std::vector<Fact>& facts);

    long fuel_left() const { return fuel_; }

private:
    std::optional<Term> norm(const Term& t, const std::vector<Fact>& facts);
    std::optional<Term> root_rules(Term t, const std::vector<Fact>& facts);

    std::vector<RewriteRule> rules_;
    long fuel_;
    bool imp_context_;
};

// Match pattern (variables bind arbitrary subterms, consistently) against t;
// returns the substitution as (var, term) pairs or nullopt.
std::optional<std::vector<std::pair<std::string, Term>>> match_pattern(const Term& pattern,
                                                                       const Term& t);

Term apply_bindings(const Term& t, const std::vector<std::pair<std::string, Term>>& bindings);

}  // namespace prover
