#include "prover/term.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace prover {

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
    // boost::hash_combine flavor
    return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

bool valid_var_name(const std::string& s) {
    if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
    for (char c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

}  // namespace

Term Term::make(TermKind k, std::string name, const Term* a, const Term* b) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->name = std::move(name);
    std::size_t h = mix(0x517cc1b7, static_cast<std::size_t>(k));
    int d = 0;
    std::size_t sz = 1;
    if (!n->name.empty()) h = mix(h, std::hash<std::string>{}(n->name));
    if (a) {
        n->a = a->node_;
        h = mix(h, a->hash());
        d = std::max(d, a->depth() + 1);
        sz += a->node_count();
    }
    if (b) {
        n->b = b->node_;
        h = mix(h, b->hash());
        d = std::max(d, b->depth() + 1);
        sz += b->node_count();
    }
    n->hash = h;
    n->depth = d;
    n->size = sz;
    return Term(std::move(n));
}

Term Term::var(std::string name) {
    if (!valid_var_name(name))
        throw std::invalid_argument("invalid variable name: '" + name + "'");
    return make(TermKind::Var, std::move(name), nullptr, nullptr);
}

Term Term::truth() { return make(TermKind::True, "", nullptr, nullptr); }
Term Term::falsity() { return make(TermKind::False, "", nullptr, nullptr); }
Term Term::negation(Term a) { return make(TermKind::Not, "", &a, nullptr); }
Term Term::conj(Term a, Term b) { return make(TermKind::And, "", &a, &b); }
Term Term::disj(Term a, Term b) { return make(TermKind::Or, "", &a, &b); }
Term Term::implies(Term a, Term b) { return make(TermKind::Imp, "", &a, &b); }
Term Term::iff(Term a, Term b) { return make(TermKind::Iff, "", &a, &b); }

const std::string& Term::var_name() const {
    assert(node_->kind == TermKind::Var);
    return node_->name;
}

const Term& Term::left() const {
    assert(node_->a);
    // Term is a thin wrapper over the node pointer, so this reinterpretation
    // is layout-safe; it avoids materializing child handles everywhere.
    return reinterpret_cast<const Term&>(node_->a);
}

const Term& Term::right() const {
    assert(node_->b);
    return reinterpret_cast<const Term&>(node_->b);
}

bool Term::operator==(const Term& other) const {
    const Node* x = node_.get();
    const Node* y = other.node_.get();
    if (x == y) return true;
    if (x->hash != y->hash || x->kind != y->kind) return false;
    if (x->kind == TermKind::Var) return x->name == y->name;
    if (x->a && !(left() == other.left())) return false;
    if (x->b && !(right() == other.right())) return false;
    return true;
}

int term_compare(const Term& a, const Term& b) {
    if (a.kind() != b.kind())
        return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    switch (a.kind()) {
        case TermKind::Var: {
            int c = a.var_name().compare(b.var_name());
            return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        case TermKind::True:
        case TermKind::False:
            return 0;
        case TermKind::Not:
            return term_compare(a.left(), b.left());
        default: {
            int c = term_compare(a.left(), b.left());
            if (c != 0) return c;
            return term_compare(a.right(), b.right());
        }
    }
}

namespace {

// Precedence levels, loosest first: <=> (1), ==> (2), \/ (3), /\ (4), ~ (5).
int prec(TermKind k) {
    switch (k) {
        case TermKind::Iff: return 1;
        case TermKind::Imp: return 2;
        case TermKind::Or: return 3;
        case TermKind::And: return 4;
        case TermKind::Not: return 5;
        default: return 6;
    }
}

void print_rec(const Term& t, int parent_prec, bool left_of_right_assoc, std::string& out) {
    int p = prec(t.kind());
    bool parens = p < parent_prec || (p == parent_prec && left_of_right_assoc);
    if (parens) out += '(';
    switch (t.kind()) {
        case TermKind::Var: out += t.var_name(); break;
        case TermKind::True: out += 'T'; break;
        case TermKind::False: out += 'F'; break;
        case TermKind::Not:
            out += '~';
            print_rec(t.left(), p, false, out);
            break;
        case TermKind::And:
        case TermKind::Or: {
            // left-associative: right child needs parens at equal level
            const char* op = t.kind() == TermKind::And ? " /\\ " : " \\/ ";
            print_rec(t.left(), p, false, out);
            out += op;
            print_rec(t.right(), p + 1, false, out);
            break;
        }
        case TermKind::Imp:
        case TermKind::Iff: {
            // right-associative: left child needs parens at equal level
            const char* op = t.kind() == TermKind::Imp ? " ==> " : " <=> ";
            print_rec(t.left(), p, true, out);
            out += op;
            print_rec(t.right(), p, false, out);
            break;
        }
    }
    if (parens) out += ')';
}

}  // namespace

std::string Term::to_string() const {
    std::string out;
    out.reserve(node_count() * 4);
    print_rec(*this, 0, false, out);
    return out;
}

std::vector<std::string> free_vars(const Term& t) {
    std::vector<std::string> order;
    std::unordered_set<std::string> seen;
    std::function<void(const Term&)> walk = [&](const Term& u) {
        switch (u.kind()) {
            case TermKind::Var:
                if (seen.insert(u.var_name()).second) order.push_back(u.var_name());
                break;
            case TermKind::True:
            case TermKind::False:
                break;
            case TermKind::Not:
                walk(u.left());
                break;
            default:
                walk(u.left());
                walk(u.right());
        }
    };
    walk(t);
    return order;
}

Term subst_var(const Term& t, const std::string& name, const Term& value) {
    switch (t.kind()) {
        case TermKind::Var:
            return t.var_name() == name ? value : t;
        case TermKind::True:
        case TermKind::False:
            return t;
        case TermKind::Not: {
            Term a = subst_var(t.left(), name, value);
            return a == t.left() ? t : Term::negation(a);
        }
        default: {
            Term a = subst_var(t.left(), name, value);
            Term b = subst_var(t.right(), name, value);
            if (a == t.left() && b == t.right()) return t;
            switch (t.kind()) {
                case TermKind::And: return Term::conj(a, b);
                case TermKind::Or: return Term::disj(a, b);
                case TermKind::Imp: return Term::implies(a, b);
                default: return Term::iff(a, b);
            }
        }
    }
}

std::vector<std::string> tokenize_polish(const Term& t) {
    std::vector<std::string> out;
    out.reserve(t.node_count());
    std::function<void(const Term&)> walk = [&](const Term& u) {
        switch (u.kind()) {
            case TermKind::Var: out.push_back(u.var_name()); break;
            case TermKind::True: out.push_back("T"); break;
            case TermKind::False: out.push_back("F"); break;
            case TermKind::Not:
                out.push_back("~");
                walk(u.left());
                break;
            case TermKind::And:
            case TermKind::Or:
            case TermKind::Imp:
            case TermKind::Iff: {
                const char* op = u.kind() == TermKind::And   ? "/\\"
                                 : u.kind() == TermKind::Or  ? "\\/"
                                 : u.kind() == TermKind::Imp ? "==>"
                                                             : "<=>";
                out.push_back(op);
                walk(u.left());
                walk(u.right());
                break;
            }
        }
    };
    walk(t);
    return out;
}

}  // namespace prover
