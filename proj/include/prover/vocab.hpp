#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "prover/goal.hpp"
#include "prover/term.hpp"
#include "prover/theorem.hpp"

namespace prover {

// Token → dense id map over connectives, constants and the variable names a
// corpus uses. Unknown tokens (variables outside the corpus) map to a
// reserved id so arbitrary goals still encode.
class Vocab {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;

    // Fixed tokens only (connectives + constants).
    Vocab() : Vocab(std::vector<std::string>{}) {}
    // Fixed tokens followed by the variable names, deduped and sorted.
    explicit Vocab(std::vector<std::string> variables);

    static Vocab from_corpus(const std::vector<Theorem>& theorems);
    // Rebuilds from a serialized token list; validates the fixed prefix.
    static Vocab from_tokens(const std::vector<std::string>& tokens);

    int id(const std::string& token) const;
    const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
    int size() const { return static_cast<int>(tokens_.size()); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    std::vector<int> encode_term(const Term& t) const;
    // Tokens of the goal's chained-implication form: goals equal up to
    // assumption order encode identically.
    std::vector<int> encode_goal(const Goal& g) const;

    bool operator==(const Vocab& o) const { return tokens_ == o.tokens_; }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> ids_;
};

}  // namespace prover
