#include "prover/tactic.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "prover/dpll.hpp"
#include "prover/rewrite.hpp"

namespace prover {

ArgKind arg_kind(TacticId t) {
    switch (t) {
        case TacticId::StripTac:
        case TacticId::EqTac:
            return ArgKind::None;
        case TacticId::CaseOn:
            return ArgKind::SingleTerm;
        case TacticId::Drule:
        case TacticId::Irule:
            return ArgKind::SingleTheorem;
        default:
            return ArgKind::TheoremList;
    }
}

const char* tactic_name(TacticId t) {
    switch (t) {
        case TacticId::StripTac: return "strip_tac";
        case TacticId::EqTac: return "eq_tac";
        case TacticId::CaseOn: return "case_on";
        case TacticId::Simp: return "simp";
        case TacticId::Fs: return "fs";
        case TacticId::Rw: return "rw";
        case TacticId::Metis: return "metis";
        case TacticId::Drule: return "drule";
        case TacticId::Irule: return "irule";
    }
    return "?";
}

std::optional<TacticId> tactic_from_name(std::string_view name) {
    for (int i = 0; i < kNumTactics; ++i) {
        TacticId t = static_cast<TacticId>(i);
        if (name == tactic_name(t)) return t;
    }
    return std::nullopt;
}

TacticOutcome TacticOutcome::make_subgoals(std::vector<Goal> gs) {
    // Outcomes are goal *sets*: drop duplicates, keep first-occurrence order.
    std::vector<Goal> unique;
    for (Goal& g : gs) {
        bool seen = false;
        for (const Goal& u : unique)
            if (u == g) {
                seen = true;
                break;
            }
        if (!seen) unique.push_back(std::move(g));
    }
    return {Kind::Subgoals, std::move(unique), {}};
}

namespace {

bool contains(const std::vector<Term>& ts, const Term& t) {
    return std::any_of(ts.begin(), ts.end(), [&](const Term& u) { return u == t; });
}

// Decompose a stripped antecedent into assumption conjuncts.
void split_conjuncts(const Term& t, std::vector<Term>& out) {
    if (t.kind() == TermKind::And) {
        split_conjuncts(t.left(), out);
        split_conjuncts(t.right(), out);
    } else {
        out.push_back(t);
    }
}

TacticOutcome strip_tac(const Goal& g) {
    // At entry, a conclusion that is T or already assumed closes the goal.
    // Mid-strip the rule is narrower (a goal closes only when a *freshly*
    // stripped conjunct equals what remains to prove): stripping p/\q onto
    // the conclusion p/\q must leave {p,q} |- p and {p,q} |- q open rather
    // than closing them by assumption.
    if (g.conclusion().kind() == TermKind::True || contains(g.assumptions(), g.conclusion()))
        return TacticOutcome::make_subgoals({});

    std::vector<Goal> out;
    std::vector<Goal> work = {g};
    while (!work.empty()) {
        Goal cur = work.front();
        work.erase(work.begin());

        std::vector<Term> assums = cur.assumptions();
        Term concl = cur.conclusion();
        bool closed = false;
        for (;;) {
            if (concl.kind() == TermKind::True) {
                closed = true;
                break;
            }
            if (concl.kind() == TermKind::Imp) {
                std::vector<Term> conjuncts;
                split_conjuncts(concl.left(), conjuncts);
                if (contains(conjuncts, concl.right())) {
                    closed = true;
                    break;
                }
                assums.insert(assums.end(), conjuncts.begin(), conjuncts.end());
                concl = concl.right();
                continue;
            }
            break;
        }
        if (closed) continue;
        if (concl.kind() == TermKind::And) {
            // Left subgoal first, preserving proof order.
            work.insert(work.begin(), Goal(assums, concl.right()));
            work.insert(work.begin(), Goal(assums, concl.left()));
            continue;
        }
        out.emplace_back(std::move(assums), std::move(concl));
    }
    if (out.size() == 1 && out[0] == g) return TacticOutcome::no_change();
    return TacticOutcome::make_subgoals(std::move(out));
}

TacticOutcome eq_tac(const Goal& g) {
    if (g.conclusion().kind() != TermKind::Iff)
        return TacticOutcome::failed("eq_tac: conclusion is not an equivalence");
    const Term& a = g.conclusion().left();
    const Term& b = g.conclusion().right();
    return TacticOutcome::make_subgoals({g.with_conclusion(Term::implies(a, b)),
                                         g.with_conclusion(Term::implies(b, a))});
}

TacticOutcome case_on(const Goal& g, const Term& var) {
    if (var.kind() != TermKind::Var)
        return TacticOutcome::failed("case_on: argument must be a variable");
    auto substituted = [&](const Term& value) {
        std::vector<Term> assums;
        assums.reserve(g.assumptions().size());
        for (const Term& a : g.assumptions())
            assums.push_back(subst_var(a, var.var_name(), value));
        return Goal(std::move(assums), subst_var(g.conclusion(), var.var_name(), value));
    };
    return TacticOutcome::make_subgoals({substituted(Term::truth()),
                                         substituted(Term::falsity())});
}

std::vector<RewriteRule> rules_from(const std::vector<Theorem>& thms) {
    std::vector<RewriteRule> rules;
    for (const Theorem& th : thms) {
        const Term& s = th.statement;
        // Only equivalences act as rewrites, oriented left-to-right; the
        // right side must not introduce fresh variables, and a bare-variable
        // left side would match everything (instant loop), so both are
        // skipped. Other statements are simply inert for the simp family.
        if (s.kind() != TermKind::Iff) continue;
        if (s.left().kind() == TermKind::Var) continue;
        std::vector<std::string> lv = free_vars(s.left());
        bool closed = true;
        for (const std::string& v : free_vars(s.right()))
            if (std::find(lv.begin(), lv.end(), v) == lv.end()) {
                closed = false;
                break;
            }
        if (!closed) continue;
        rules.push_back({s.left(), s.right()});
    }
    return rules;
}

TacticOutcome simp_like(const Goal& g, const std::vector<Theorem>& thms, long fuel,
                        bool use_assumptions, bool rewrite_assumptions) {
    Rewriter rw(rules_from(thms), fuel, /*use_imp_context=*/true);

    std::vector<Term> assums = g.assumptions();
    if (rewrite_assumptions) {
        std::vector<Term> next;
        for (const Term& a : assums) {
            auto na = rw.normalize(a);
            if (!na) return TacticOutcome::fuel_exhausted();
            if (na->kind() == TermKind::False)
                return TacticOutcome::make_subgoals({});  // contradictory assumptions
            if (na->kind() == TermKind::True) continue;   // vacuous assumption
            next.push_back(*na);
        }
        assums = std::move(next);
    }

    std::vector<Fact> facts;
    if (use_assumptions)
        for (const Term& a : assums) collect_facts(a, facts);

    auto concl = rw.normalize(g.conclusion(), facts);
    if (!concl) return TacticOutcome::fuel_exhausted();
    if (concl->kind() == TermKind::True) return TacticOutcome::make_subgoals({});

    Goal reduced(std::move(assums), *concl);
    if (reduced == g) return TacticOutcome::no_change();
    return TacticOutcome::make_subgoals({std::move(reduced)});
}

TacticOutcome metis(const Goal& g, const std::vector<Theorem>& thms, long fuel) {
    Term t = g.as_term();
    for (auto it = thms.rbegin(); it != thms.rend(); ++it)
        t = Term::implies(it->statement, t);
    switch (dpll_tautology(t, fuel)) {
        case DpllResult::Proved: return TacticOutcome::make_subgoals({});
        case DpllResult::Refuted: return TacticOutcome::failed("metis: goal is not provable");
        default: return TacticOutcome::fuel_exhausted();
    }
}

// Theorem statement reduced to implication form by plain boolean rewriting
// (no implication-context tricks, which would collapse p==>q==>p to T).
std::optional<Term> implication_form(const Term& statement, long fuel) {
    Rewriter rw({}, fuel, /*use_imp_context=*/false);
    return rw.normalize(statement);
}

TacticOutcome drule(const Goal& g, const Theorem& thm, long fuel) {
    auto norm = implication_form(thm.statement, fuel);
    if (!norm) return TacticOutcome::fuel_exhausted();
    if (norm->kind() != TermKind::Imp)
        return TacticOutcome::failed("drule: theorem is not an implication");
    const Term& A = norm->left();
    const Term& B = norm->right();

    std::vector<std::string> av = free_vars(A);
    for (const std::string& v : free_vars(B))
        if (std::find(av.begin(), av.end(), v) == av.end())
            return TacticOutcome::failed("drule: conclusion variables not determined by match");

    for (const Term& assum : g.assumptions()) {
        if (auto bindings = match_pattern(A, assum)) {
            Goal next = g.with_assumption(apply_bindings(B, *bindings));
            if (next == g) return TacticOutcome::no_change();
            return TacticOutcome::make_subgoals({std::move(next)});
        }
    }
    return TacticOutcome::failed("drule: no assumption matches the antecedent");
}

TacticOutcome irule(const Goal& g, const Theorem& thm, long fuel) {
    auto norm = implication_form(thm.statement, fuel);
    if (!norm) return TacticOutcome::fuel_exhausted();
    if (norm->kind() != TermKind::Imp)
        return TacticOutcome::failed("irule: theorem is not an implication");
    const Term& A = norm->left();
    const Term& B = norm->right();

    std::vector<std::string> bv = free_vars(B);
    for (const std::string& v : free_vars(A))
        if (std::find(bv.begin(), bv.end(), v) == bv.end())
            return TacticOutcome::failed("irule: antecedent variables not determined by match");

    auto bindings = match_pattern(B, g.conclusion());
    if (!bindings) return TacticOutcome::failed("irule: conclusion does not match");
    Goal next = g.with_conclusion(apply_bindings(A, *bindings));
    if (next == g) return TacticOutcome::no_change();
    return TacticOutcome::make_subgoals({std::move(next)});
}

}  // namespace

TacticOutcome apply_tactic(const Goal& g, TacticId t, const std::vector<Term>& term_args,
                           const std::vector<Theorem>& thm_args, long fuel) {
    if (fuel <= 0) throw std::invalid_argument("apply_tactic: fuel must be positive");
    switch (arg_kind(t)) {
        case ArgKind::None:
            if (!term_args.empty() || !thm_args.empty())
                throw std::invalid_argument(std::string(tactic_name(t)) + " takes no arguments");
            break;
        case ArgKind::SingleTerm:
            if (term_args.size() != 1 || !thm_args.empty())
                throw std::invalid_argument(std::string(tactic_name(t)) +
                                            " takes exactly one term argument");
            break;
        case ArgKind::SingleTheorem:
            if (!term_args.empty() || thm_args.size() != 1)
                throw std::invalid_argument(std::string(tactic_name(t)) +
                                            " takes exactly one theorem argument");
            break;
        case ArgKind::TheoremList:
            if (!term_args.empty())
                throw std::invalid_argument(std::string(tactic_name(t)) +
                                            " takes theorem arguments only");
            break;
    }

    switch (t) {
        case TacticId::StripTac: return strip_tac(g);
        case TacticId::EqTac: return eq_tac(g);
        case TacticId::CaseOn: return case_on(g, term_args[0]);
        case TacticId::Simp:
            return simp_like(g, thm_args, fuel, /*use_assumptions=*/true,
                             /*rewrite_assumptions=*/false);
        case TacticId::Fs:
            return simp_like(g, thm_args, fuel, /*use_assumptions=*/true,
                             /*rewrite_assumptions=*/true);
        case TacticId::Rw:
            return simp_like(g, thm_args, fuel, /*use_assumptions=*/false,
                             /*rewrite_assumptions=*/false);
        case TacticId::Metis: return metis(g, thm_args, fuel);
        case TacticId::Drule: return drule(g, thm_args[0], fuel);
        case TacticId::Irule: return irule(g, thm_args[0], fuel);
    }
    throw std::logic_error("unknown tactic");
}

std::string theory_of_var(const std::string& var_name) {
    auto pos = var_name.find('_');
    return pos == std::string::npos ? var_name : var_name.substr(0, pos);
}

Candidates candidate_arguments(const Goal& g, TacticId t, const std::vector<Theorem>& library,
                               int target_index) {
    Candidates c;
    c.kind = arg_kind(t);
    switch (c.kind) {
        case ArgKind::None:
            break;
        case ArgKind::SingleTerm:
            for (const std::string& v : free_vars(g.as_term())) c.terms.push_back(Term::var(v));
            break;
        case ArgKind::SingleTheorem:
        case ArgKind::TheoremList: {
            std::unordered_set<std::string> theories;
            for (const std::string& v : free_vars(g.as_term()))
                theories.insert(theory_of_var(v));
            int limit = std::min<int>(target_index, static_cast<int>(library.size()));
            for (int i = 0; i < limit; ++i)
                if (theories.count(library[i].theory)) c.theorem_indices.push_back(i);
            break;
        }
    }
    return c;
}

}  // namespace prover
