#include "prover/rewrite.hpp"

namespace prover {

void collect_facts(const Term& t, std::vector<Fact>& out) {
    switch (t.kind()) {
        case TermKind::True:
        case TermKind::False:
            return;  // constants carry no information as facts
        case TermKind::And:
            out.push_back({t, true});
            collect_facts(t.left(), out);
            collect_facts(t.right(), out);
            return;
        case TermKind::Not:
            out.push_back({t, true});
            if (!t.left().is_leaf() || t.left().kind() == TermKind::Var)
                out.push_back({t.left(), false});
            return;
        default:
            out.push_back({t, true});
            return;
    }
}

std::optional<std::vector<std::pair<std::string, Term>>> match_pattern(const Term& pattern,
                                                                       const Term& t) {
    std::vector<std::pair<std::string, Term>> bindings;
    // Explicit worklist keeps left-to-right order: leftmost pattern variables
    // bind first.
    std::vector<std::pair<const Term*, const Term*>> work = {{&pattern, &t}};
    while (!work.empty()) {
        auto [p, u] = work.front();
        work.erase(work.begin());
        if (p->kind() == TermKind::Var) {
            bool found = false;
            for (const auto& [name, bound] : bindings)
                if (name == p->var_name()) {
                    if (!(bound == *u)) return std::nullopt;
                    found = true;
                    break;
                }
            if (!found) bindings.emplace_back(p->var_name(), *u);
            continue;
        }
        if (p->kind() != u->kind()) return std::nullopt;
        switch (p->kind()) {
            case TermKind::True:
            case TermKind::False:
                break;
            case TermKind::Not:
                work.emplace_back(&p->left(), &u->left());
                break;
            default:
                work.emplace_back(&p->left(), &u->left());
                work.emplace_back(&p->right(), &u->right());
        }
    }
    return bindings;
}

Term apply_bindings(const Term& t, const std::vector<std::pair<std::string, Term>>& bindings) {
    switch (t.kind()) {
        case TermKind::Var:
            for (const auto& [name, bound] : bindings)
                if (name == t.var_name()) return bound;
            return t;
        case TermKind::True:
        case TermKind::False:
            return t;
        case TermKind::Not:
            return Term::negation(apply_bindings(t.left(), bindings));
        case TermKind::And:
            return Term::conj(apply_bindings(t.left(), bindings),
                              apply_bindings(t.right(), bindings));
        case TermKind::Or:
            return Term::disj(apply_bindings(t.left(), bindings),
                              apply_bindings(t.right(), bindings));
        case TermKind::Imp:
            return Term::implies(apply_bindings(t.left(), bindings),
                                 apply_bindings(t.right(), bindings));
        default:
            return Term::iff(apply_bindings(t.left(), bindings),
                             apply_bindings(t.right(), bindings));
    }
}

namespace {

bool is_true(const Term& t) { return t.kind() == TermKind::True; }
bool is_false(const Term& t) { return t.kind() == TermKind::False; }

// Root-position boolean rules over already-normalized children.
std::optional<Term> base_rule(const Term& t) {
    switch (t.kind()) {
        case TermKind::Not: {
            const Term& a = t.left();
            if (is_true(a)) return Term::falsity();
            if (is_false(a)) return Term::truth();
            if (a.kind() == TermKind::Not) return a.left();
            return std::nullopt;
        }
        case TermKind::And: {
            const Term& a = t.left();
            const Term& b = t.right();
            if (is_false(a) || is_false(b)) return Term::falsity();
            if (is_true(a)) return b;
            if (is_true(b)) return a;
            if (a == b) return a;
            return std::nullopt;
        }
        case TermKind::Or: {
            const Term& a = t.left();
            const Term& b = t.right();
            if (is_true(a) || is_true(b)) return Term::truth();
            if (is_false(a)) return b;
            if (is_false(b)) return a;
            if (a == b) return a;
            return std::nullopt;
        }
        case TermKind::Imp: {
            const Term& a = t.left();
            const Term& b = t.right();
            if (is_false(a) || is_true(b)) return Term::truth();
            if (is_true(a)) return b;
            return std::nullopt;
        }
        case TermKind::Iff:
            if (t.left() == t.right()) return Term::truth();
            return std::nullopt;
        default:
            return std::nullopt;
    }
}

}  // namespace

std::optional<Term> Rewriter::root_rules(Term t, const std::vector<Fact>& facts) {
    for (;;) {
        if (t.kind() != TermKind::True && t.kind() != TermKind::False) {
            bool fact_hit = false;
            for (const Fact& f : facts)
                if (f.term == t) {
                    if (fuel_-- <= 0) return std::nullopt;
                    t = f.value ? Term::truth() : Term::falsity();
                    fact_hit = true;
                    break;
                }
            if (fact_hit) continue;
        }
        if (auto r = base_rule(t)) {
            if (fuel_-- <= 0) return std::nullopt;
            t = *r;
            continue;
        }
        for (const RewriteRule& rule : rules_) {
            if (auto bindings = match_pattern(rule.lhs, t)) {
                if (fuel_-- <= 0) return std::nullopt;
                // The instantiated right side is arbitrary new structure:
                // normalize it fully before returning.
                return norm(apply_bindings(rule.rhs, *bindings), facts);
            }
        }
        return t;
    }
}

std::optional<Term> Rewriter::norm(const Term& t, const std::vector<Fact>& facts) {
    switch (t.kind()) {
        case TermKind::Var:
        case TermKind::True:
        case TermKind::False:
            return root_rules(t, facts);
        case TermKind::Not: {
            auto a = norm(t.left(), facts);
            if (!a) return std::nullopt;
            return root_rules(*a == t.left() ? t : Term::negation(*a), facts);
        }
        case TermKind::Imp: {
            auto a = norm(t.left(), facts);
            if (!a) return std::nullopt;
            std::optional<Term> b;
            if (imp_context_) {
                std::vector<Fact> inner = facts;
                collect_facts(*a, inner);
                b = norm(t.right(), inner);
            } else {
                b = norm(t.right(), facts);
            }
            if (!b) return std::nullopt;
            Term rebuilt = (*a == t.left() && *b == t.right()) ? t : Term::implies(*a, *b);
            return root_rules(rebuilt, facts);
        }
        default: {
            auto a = norm(t.left(), facts);
            if (!a) return std::nullopt;
            auto b = norm(t.right(), facts);
            if (!b) return std::nullopt;
            Term rebuilt = t;
            if (!(*a == t.left()) || !(*b == t.right())) {
                switch (t.kind()) {
                    case TermKind::And: rebuilt = Term::conj(*a, *b); break;
                    case TermKind::Or: rebuilt = Term::disj(*a, *b); break;
                    default: rebuilt = Term::iff(*a, *b); break;
                }
            }
            return root_rules(rebuilt, facts);
        }
    }
}

std::optional<Term> Rewriter::normalize(const Term& t, const std::vector<Fact>& facts) {
    // A single bottom-up pass can expose new redexes above theorem-rule
    // rewrites; iterate to an outer fixpoint.
    Term cur = t;
    for (;;) {
        auto next = norm(cur, facts);
        if (!next) return std::nullopt;
        if (*next == cur) return cur;
        cur = *next;
    }
}

}  // namespace prover
