#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace prover {

enum class TermKind : uint8_t { Var, True, False, Not, And, Or, Imp, Iff };

// Immutable propositional formula. Copies share structure; equality is
// structural. Variable names match [a-z][a-z0-9_]*.
class Term {
public:
    Term() = delete;

    static Term var(std::string name);
    static Term truth();
    static Term falsity();
    static Term negation(Term a);
    static Term conj(Term a, Term b);
    static Term disj(Term a, Term b);
    static Term implies(Term a, Term b);
    static Term iff(Term a, Term b);

    TermKind kind() const { return node_->kind; }
    bool is_leaf() const { return node_->kind <= TermKind::False; }

    const std::string& var_name() const;  // Var only
    const Term& left() const;             // unary child, or binary lhs
    const Term& right() const;            // binary rhs

    std::size_t hash() const { return node_->hash; }
    int depth() const { return node_->depth; }
    std::size_t node_count() const { return node_->size; }

    bool operator==(const Term& other) const;
    bool operator!=(const Term& other) const { return !(*this == other); }

    // Concrete syntax with minimal parentheses; parse_term round-trips it.
    std::string to_string() const;

private:
    struct Node {
        TermKind kind;
        std::string name;  // Var
        std::shared_ptr<const Node> a, b;
        std::size_t hash;
        int depth;
        std::size_t size;
    };

    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Term make(TermKind k, std::string name, const Term* a, const Term* b);

    std::shared_ptr<const Node> node_;

    friend struct TermHash;
};

struct TermHash {
    std::size_t operator()(const Term& t) const { return t.hash(); }
};

// Deterministic total order (preorder over kind/name), used for canonical
// sorting independent of pointer identity.
int term_compare(const Term& a, const Term& b);

// Distinct variable names in first-occurrence (left-to-right) order.
std::vector<std::string> free_vars(const Term& t);

// Every occurrence of Var(name) replaced by value.
Term subst_var(const Term& t, const std::string& name, const Term& value);

// Prefix (preorder) serialization, one token per node.
std::vector<std::string> tokenize_polish(const Term& t);

}  // namespace prover
