#pragma once

#include <string>
#include <vector>

#include "prover/term.hpp"

namespace prover {

// A sequent: assumptions |- conclusion. Assumptions are stored canonically
// (sorted by term_compare, duplicates removed), so two goals that differ only
// in assumption order or multiplicity compare equal. Tactic semantics here
// never depend on assumption position, which makes the canonical form safe.
class Goal {
public:
    explicit Goal(Term conclusion) : concl_(std::move(conclusion)) {}
    Goal(std::vector<Term> assumptions, Term conclusion);

    const std::vector<Term>& assumptions() const { return assums_; }
    const Term& conclusion() const { return concl_; }

    Goal with_conclusion(Term c) const { return Goal(assums_, std::move(c)); }
    Goal with_assumption(Term a) const;

    // a1 ==> a2 ==> ... ==> concl; the single-term view used by the encoder
    // and by validity checking.
    Term as_term() const;

    bool operator==(const Goal& other) const;
    bool operator!=(const Goal& other) const { return !(*this == other); }

    std::size_t hash() const;

    // "a1, a2 |- concl" (or just "|- concl").
    std::string to_string() const;

private:
    std::vector<Term> assums_;
    Term concl_;
};

struct GoalHash {
    std::size_t operator()(const Goal& g) const { return g.hash(); }
};

}  // namespace prover
