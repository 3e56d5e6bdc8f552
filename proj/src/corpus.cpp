#include "prover/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"
#include "prover/oracle.hpp"
#include "prover/parse.hpp"

namespace prover {

namespace {

Term random_formula(Rng& rng, const std::vector<std::string>& vars, int depth) {
    if (depth <= 0 || rng.uniform() < 0.3) {
        double r = rng.uniform();
        if (r < 0.04) return Term::truth();
        if (r < 0.08) return Term::falsity();
        return Term::var(vars[rng.below(vars.size())]);
    }
    switch (rng.below(5)) {
        case 0: return Term::negation(random_formula(rng, vars, depth - 1));
        case 1:
            return Term::conj(random_formula(rng, vars, depth - 1),
                              random_formula(rng, vars, depth - 1));
        case 2:
            return Term::disj(random_formula(rng, vars, depth - 1),
                              random_formula(rng, vars, depth - 1));
        case 3:
            return Term::implies(random_formula(rng, vars, depth - 1),
                                 random_formula(rng, vars, depth - 1));
        default:
            return Term::iff(random_formula(rng, vars, depth - 1),
                             random_formula(rng, vars, depth - 1));
    }
}

// Every schema is a tautology for arbitrary subformulas, so the statement
// shape (not brute search) guarantees validity; the oracle still checks each
// one before it is admitted.
Term instantiate_schema(Rng& rng, const std::vector<std::string>& vars, int max_depth);

// Two associations of one literal multiset are equivalent (iff-chains compute
// parity), and DPLL cost on such an equivalence roughly doubles per distinct
// variable: ~7 distinct variables outgrow the default tactic fuel until case
// splits ground a couple of them. Chain length is therefore a difficulty dial.
Term parity_chain(Rng& rng, const std::vector<std::string>& vars, int len) {
    std::vector<std::size_t> order(vars.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    std::vector<Term> lits;
    for (int i = 0; i < len; ++i) {
        Term v = Term::var(vars[order[static_cast<std::size_t>(i) % order.size()]]);
        // negating a literal on both sides keeps the parity equal
        lits.push_back(rng.below(4) == 0 ? Term::negation(v) : v);
    }

    std::vector<Term> lhs = lits, rhs = lits;
    rng.shuffle(lhs);
    rng.shuffle(rhs);
    Term left = lhs[0];
    for (std::size_t i = 1; i < lhs.size(); ++i) left = Term::iff(left, lhs[i]);
    Term right = rhs.back();
    for (std::size_t i = rhs.size() - 1; i-- > 0;) right = Term::iff(rhs[i], right);
    return Term::iff(left, right);
}

// Hard statements: a parity chain, optionally behind tautology-preserving
// glue, so proofs need decomposition (strip splits, case splits) before the
// oracle shot fits in fuel.
Term compose_statement(Rng& rng, const std::vector<std::string>& vars, int max_depth) {
    int len = static_cast<int>(std::min<std::size_t>(vars.size(), 6 + rng.below(3)));
    Term chain = parity_chain(rng, vars, len);
    switch (rng.below(3)) {
        case 0: return chain;
        case 1: return Term::implies(random_formula(rng, vars, 2), chain);
        default: return Term::conj(instantiate_schema(rng, vars, max_depth - 2), chain);
    }
}

Term instantiate_schema(Rng& rng, const std::vector<std::string>& vars, int max_depth) {
    if (max_depth >= 6 && rng.uniform() < 0.65)
        return compose_statement(rng, vars, max_depth);
    int sub = std::max(1, max_depth - 3);
    auto A = [&] { return random_formula(rng, vars, sub); };
    Term x = Term::var(vars[rng.below(vars.size())]);

    switch (rng.below(12)) {
        case 0: {  // implication chain ending where it started
            Term a = A();
            Term t = Term::implies(A(), a);
            if (rng.below(2)) t = Term::implies(A(), t);
            return Term::implies(a, t);
        }
        case 1: {  // conjunction distributes over disjunction
            Term a = A(), b = A(), c = A();
            return Term::iff(Term::conj(a, Term::disj(b, c)),
                             Term::disj(Term::conj(a, b), Term::conj(a, c)));
        }
        case 2: {  // disjunction distributes over conjunction
            Term a = A(), b = A(), c = A();
            return Term::iff(Term::disj(a, Term::conj(b, c)),
                             Term::conj(Term::disj(a, b), Term::disj(a, c)));
        }
        case 3: {  // case split on a variable
            Term b = A();
            return Term::implies(Term::implies(x, b),
                                 Term::implies(Term::implies(Term::negation(x), b), b));
        }
        case 4: {  // excluded-middle split feeding a disjunction
            Term a = A(), b = A();
            return Term::implies(
                Term::disj(Term::conj(x, a), Term::conj(Term::negation(x), b)),
                Term::disj(a, b));
        }
        case 5: {  // contrapositive
            Term a = A(), b = A();
            Term fwd = Term::implies(a, b);
            Term rev = Term::implies(Term::negation(b), Term::negation(a));
            return rng.below(2) ? Term::iff(fwd, rev) : Term::implies(fwd, rev);
        }
        case 6: {  // weakening
            Term a = A(), b = A();
            return rng.below(2) ? Term::implies(Term::conj(a, b), a)
                                : Term::implies(a, Term::disj(a, b));
        }
        case 7: {  // implication splits over conjunction
            Term a = A(), b = A(), c = A();
            return Term::iff(Term::implies(a, Term::conj(b, c)),
                             Term::conj(Term::implies(a, b), Term::implies(a, c)));
        }
        case 8: {  // Peirce's law
            Term a = A(), b = A();
            return Term::implies(Term::implies(Term::implies(a, b), a), a);
        }
        case 9: {  // absorption
            Term a = A(), b = A();
            return rng.below(2) ? Term::iff(Term::conj(a, Term::disj(a, b)), a)
                                : Term::iff(Term::disj(a, Term::conj(a, b)), a);
        }
        case 10: {  // De Morgan
            Term a = A(), b = A();
            return rng.below(2)
                       ? Term::iff(Term::negation(Term::conj(a, b)),
                                   Term::disj(Term::negation(a), Term::negation(b)))
                       : Term::iff(Term::negation(Term::disj(a, b)),
                                   Term::conj(Term::negation(a), Term::negation(b)));
        }
        default: {  // hypothetical syllogism
            Term a = A(), b = A(), c = A();
            return Term::implies(
                Term::implies(a, b),
                Term::implies(Term::implies(b, c), Term::implies(a, c)));
        }
    }
}

}  // namespace

std::vector<Theorem> generate_corpus(const CorpusConfig& cfg) {
    if (cfg.n < 1) throw std::invalid_argument("corpus size must be >= 1");
    if (cfg.max_vars < 1 || cfg.max_vars > 8)
        throw std::invalid_argument("max_vars must be in 1..8");
    if (cfg.theory_count < 1) throw std::invalid_argument("need at least one theory");

    std::vector<std::vector<std::string>> theory_vars(
        static_cast<std::size_t>(cfg.theory_count));
    for (int k = 0; k < cfg.theory_count; ++k)
        for (int v = 0; v < cfg.max_vars; ++v)
            theory_vars[static_cast<std::size_t>(k)].push_back(
                "t" + std::to_string(k) + "_" + std::string(1, static_cast<char>('a' + v)));

    Rng rng(cfg.seed);
    std::vector<Theorem> out;
    std::unordered_set<Term, TermHash> seen;
    for (int i = 0; i < cfg.n; ++i) {
        int k = i % cfg.theory_count;
        std::vector<std::string> pool = theory_vars[static_cast<std::size_t>(k)];
        // occasionally borrow a foreign variable so goals can mention
        // several theories
        if (cfg.theory_count > 1 && rng.uniform() < 0.15) {
            int other = (k + 1 + static_cast<int>(rng.below(
                                     static_cast<std::size_t>(cfg.theory_count - 1)))) %
                        cfg.theory_count;
            pool.push_back(theory_vars[static_cast<std::size_t>(other)]
                                      [rng.below(static_cast<std::size_t>(cfg.max_vars))]);
        }

        bool placed = false;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Term t = instantiate_schema(rng, pool, cfg.max_depth);
            if (!is_tautology(t)) throw std::logic_error("schema produced a non-tautology");
            if (!seen.insert(t).second) continue;
            out.push_back(Theorem{"t" + std::to_string(k) + "_thm" + std::to_string(i), t,
                                  "t" + std::to_string(k), i});
            placed = true;
            break;
        }
        if (!placed)
            throw std::runtime_error("corpus generation stalled: could not find a fresh "
                                     "statement after 1000 attempts");
    }
    return out;
}

std::pair<std::vector<Theorem>, std::vector<Theorem>> split_corpus(
    const std::vector<Theorem>& corpus, double ratio, uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw std::invalid_argument("split ratio must lie strictly between 0 and 1");
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);

    auto train_n = static_cast<std::size_t>(
        std::ceil(ratio * static_cast<double>(corpus.size())));
    std::pair<std::vector<Theorem>, std::vector<Theorem>> split;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < train_n ? split.first : split.second).push_back(corpus[order[i]]);
    return split;
}

void save_corpus(const std::vector<Theorem>& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write corpus file: " + path);
    for (const Theorem& t : corpus) {
        nlohmann::json j{{"name", t.name},
                         {"statement", t.statement.to_string()},
                         {"theory", t.theory},
                         {"index", t.index}};
        out << j.dump() << "\n";
    }
    if (!out) throw std::runtime_error("short write to corpus file: " + path);
}

std::vector<Theorem> load_corpus(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path);

    std::vector<Theorem> out;
    std::set<std::string> names;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::string where = path + ":" + std::to_string(lineno);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error(where + ": malformed record: " + e.what());
        }
        if (!j.contains("name") || !j.contains("statement") || !j.contains("theory") ||
            !j.contains("index"))
            throw std::runtime_error(where + ": record is missing a required field");

        auto name = j["name"].get<std::string>();
        Term statement = [&] {
            try {
                return parse_term(j["statement"].get<std::string>());
            } catch (const ParseError& e) {
                throw std::runtime_error(where + ": bad statement: " + e.what());
            }
        }();
        if (!names.insert(name).second)
            throw std::runtime_error(where + ": duplicate theorem name '" + name + "'");
        if (!is_tautology(statement))
            throw std::runtime_error(where + ": statement of '" + name +
                                     "' is not a tautology");
        out.push_back(Theorem{std::move(name), std::move(statement),
                              j["theory"].get<std::string>(), j["index"].get<int>()});
    }

    std::sort(out.begin(), out.end(),
              [](const Theorem& a, const Theorem& b) { return a.index < b.index; });
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i].index != static_cast<int>(i))
            throw std::runtime_error(path + ": library indices are not a permutation of 0.." +
                                     std::to_string(out.size() - 1));
    return out;
}

}  // namespace prover
