#include "prover/vocab.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace prover {

namespace {

const std::vector<std::string>& fixed_tokens() {
    static const std::vector<std::string> kFixed = {
        "<pad>", "<unk>", "~", "/\\", "\\/", "==>", "<=>", "T", "F",
    };
    return kFixed;
}

}  // namespace

Vocab::Vocab(std::vector<std::string> variables) {
    tokens_ = fixed_tokens();
    std::sort(variables.begin(), variables.end());
    variables.erase(std::unique(variables.begin(), variables.end()), variables.end());
    for (std::string& v : variables) tokens_.push_back(std::move(v));
    for (std::size_t i = 0; i < tokens_.size(); ++i)
        ids_[tokens_[i]] = static_cast<int>(i);
    if (ids_.size() != tokens_.size())
        throw std::invalid_argument("vocab: a variable collides with a fixed token");
}

Vocab Vocab::from_corpus(const std::vector<Theorem>& theorems) {
    std::set<std::string> vars;
    for (const Theorem& t : theorems)
        for (std::string& v : free_vars(t.statement)) vars.insert(std::move(v));
    return Vocab(std::vector<std::string>(vars.begin(), vars.end()));
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
    const auto& fixed = fixed_tokens();
    if (tokens.size() < fixed.size() ||
        !std::equal(fixed.begin(), fixed.end(), tokens.begin()))
        throw std::invalid_argument("vocab: serialized token list lacks the fixed prefix");
    return Vocab(std::vector<std::string>(tokens.begin() + static_cast<long>(fixed.size()),
                                          tokens.end()));
}

int Vocab::id(const std::string& token) const {
    auto it = ids_.find(token);
    return it == ids_.end() ? kUnk : it->second;
}

std::vector<int> Vocab::encode_term(const Term& t) const {
    std::vector<std::string> toks = tokenize_polish(t);
    std::vector<int> out;
    out.reserve(toks.size());
    for (const std::string& tok : toks) out.push_back(id(tok));
    return out;
}

std::vector<int> Vocab::encode_goal(const Goal& g) const { return encode_term(g.as_term()); }

}  // namespace prover
