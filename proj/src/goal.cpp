#include "prover/goal.hpp"

#include <algorithm>

namespace prover {

Goal::Goal(std::vector<Term> assumptions, Term conclusion)
    : assums_(std::move(assumptions)), concl_(std::move(conclusion)) {
    std::sort(assums_.begin(), assums_.end(),
              [](const Term& a, const Term& b) { return term_compare(a, b) < 0; });
    assums_.erase(std::unique(assums_.begin(), assums_.end()), assums_.end());
}

Goal Goal::with_assumption(Term a) const {
    std::vector<Term> as = assums_;
    as.push_back(std::move(a));
    return Goal(std::move(as), concl_);
}

Term Goal::as_term() const {
    Term t = concl_;
    for (auto it = assums_.rbegin(); it != assums_.rend(); ++it)
        t = Term::implies(*it, t);
    return t;
}

bool Goal::operator==(const Goal& other) const {
    if (!(concl_ == other.concl_)) return false;
    if (assums_.size() != other.assums_.size()) return false;
    for (std::size_t i = 0; i < assums_.size(); ++i)
        if (!(assums_[i] == other.assums_[i])) return false;
    return true;
}

std::size_t Goal::hash() const {
    std::size_t h = concl_.hash();
    for (const Term& a : assums_)
        h ^= a.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

std::string Goal::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < assums_.size(); ++i) {
        if (i) out += ", ";
        out += assums_[i].to_string();
    }
    if (!assums_.empty()) out += ' ';
    out += "|- ";
    out += concl_.to_string();
    return out;
}

}  // namespace prover
