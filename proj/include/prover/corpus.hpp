#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "prover/rng.hpp"
#include "prover/theorem.hpp"

namespace prover {

struct CorpusConfig {
    uint64_t seed = 0;
    int n = 250;
    int max_vars = 8;   // variables per theory (<= 8)
    int max_depth = 7;  // schema depth budget; >= 6 also enables hard instances
    int theory_count = 5;
};

// n distinct oracle-verified tautologies built by instantiating tautology
// schemas with random subformulas. Theories are assigned round-robin and
// determine the variable prefix ("t<k>_"), which in turn scopes premise
// candidates during search. Throws std::runtime_error if generation stalls.
std::vector<Theorem> generate_corpus(const CorpusConfig& cfg);

// Deterministic shuffled split; the train side holds ceil(ratio * n).
std::pair<std::vector<Theorem>, std::vector<Theorem>> split_corpus(
    const std::vector<Theorem>& corpus, double ratio, uint64_t seed);

// One structured record per line: {"name", "statement", "theory", "index"}.
void save_corpus(const std::vector<Theorem>& corpus, const std::string& path);
// Validates on load: parseable, unique names, index permutation, every
// statement a tautology. Errors cite the offending line or record.
std::vector<Theorem> load_corpus(const std::string& path);

}  // namespace prover
