#include "prover/oracle.hpp"

#include <functional>
#include <stdexcept>
#include <unordered_map>

namespace prover {

namespace {

// Values of variable v across assignments: assignment index a gives bit
// (a >> v) & 1. For v < 6 the pattern within a 64-assignment block is fixed;
// for v >= 6 the whole block is all-ones or all-zeros depending on the block
// index.
const uint64_t kLowVarPattern[6] = {
    0xaaaaaaaaaaaaaaaaULL, 0xccccccccccccccccULL, 0xf0f0f0f0f0f0f0f0ULL,
    0xff00ff00ff00ff00ULL, 0xffff0000ffff0000ULL, 0xffffffff00000000ULL,
};

uint64_t eval_block(const Term& t, const std::unordered_map<std::string, int>& index,
                    uint64_t block) {
    switch (t.kind()) {
        case TermKind::Var: {
            int v = index.at(t.var_name());
            if (v < 6) return kLowVarPattern[v];
            return (block >> (v - 6)) & 1 ? ~0ULL : 0ULL;
        }
        case TermKind::True: return ~0ULL;
        case TermKind::False: return 0ULL;
        case TermKind::Not: return ~eval_block(t.left(), index, block);
        case TermKind::And:
            return eval_block(t.left(), index, block) & eval_block(t.right(), index, block);
        case TermKind::Or:
            return eval_block(t.left(), index, block) | eval_block(t.right(), index, block);
        case TermKind::Imp:
            return ~eval_block(t.left(), index, block) | eval_block(t.right(), index, block);
        case TermKind::Iff:
            return ~(eval_block(t.left(), index, block) ^ eval_block(t.right(), index, block));
    }
    return 0;  // unreachable
}

}  // namespace

bool is_tautology(const Term& t) {
    std::vector<std::string> vars = free_vars(t);
    if (static_cast<int>(vars.size()) > kMaxOracleVars)
        throw std::invalid_argument("is_tautology: term has " +
                                    std::to_string(vars.size()) + " variables (max " +
                                    std::to_string(kMaxOracleVars) + ")");
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < vars.size(); ++i) index[vars[i]] = static_cast<int>(i);

    int n = static_cast<int>(vars.size());
    if (n <= 6) {
        uint64_t used = n == 6 ? ~0ULL : ((1ULL << (1 << n)) - 1);
        return (eval_block(t, index, 0) & used) == used;
    }
    uint64_t blocks = 1ULL << (n - 6);
    for (uint64_t b = 0; b < blocks; ++b)
        if (eval_block(t, index, b) != ~0ULL) return false;
    return true;
}

bool is_valid_goal(const Goal& g) { return is_tautology(g.as_term()); }

bool eval_term(const Term& t, const std::vector<std::pair<std::string, bool>>& env) {
    switch (t.kind()) {
        case TermKind::Var:
            for (const auto& [name, val] : env)
                if (name == t.var_name()) return val;
            return false;
        case TermKind::True: return true;
        case TermKind::False: return false;
        case TermKind::Not: return !eval_term(t.left(), env);
        case TermKind::And: return eval_term(t.left(), env) && eval_term(t.right(), env);
        case TermKind::Or: return eval_term(t.left(), env) || eval_term(t.right(), env);
        case TermKind::Imp: return !eval_term(t.left(), env) || eval_term(t.right(), env);
        case TermKind::Iff: return eval_term(t.left(), env) == eval_term(t.right(), env);
    }
    return false;  // unreachable
}

}  // namespace prover
