#include "prover/env.hpp"

#include <algorithm>
#include <stdexcept>

namespace prover {

const char* outcome_name(OutcomeKind k) {
    switch (k) {
        case OutcomeKind::Proved: return "proved";
        case OutcomeKind::Progress: return "progress";
        case OutcomeKind::SubgoalSolved: return "subgoal_solved";
        case OutcomeKind::NoOp: return "noop";
        case OutcomeKind::BudgetExhausted: return "budget_exhausted";
    }
    return "?";
}

double DifficultyTracker::rate(const std::string& theorem) const {
    auto it = rates_.find(theorem);
    return it == rates_.end() ? 0.0 : it->second;
}

double DifficultyTracker::mean_rate() const {
    if (rates_.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [name, r] : rates_) s += r;
    return s / static_cast<double>(rates_.size());
}

void DifficultyTracker::record(const std::string& theorem, bool proved) {
    double& r = rates_[theorem];  // starts at 0 when unseen
    r = 0.9 * r + 0.1 * (proved ? 1.0 : 0.0);
}

Env::Env(const Theorem& target, const std::vector<Theorem>& library, EpisodeConfig cfg,
         const DifficultyTracker& tracker)
    : target_(target),
      library_(&library),
      cfg_(cfg),
      tracker_(&tracker),
      state_{{Fringe{{Goal(target.statement)}, std::nullopt}}, 0, Goal(target.statement)} {}

std::optional<int> Env::proved_fringe() const {
    for (std::size_t i = 0; i < state_.fringes.size(); ++i)
        if (state_.fringes[i].goals.empty()) return static_cast<int>(i);
    return std::nullopt;
}

bool Env::done() const {
    return proved_fringe().has_value() || state_.timestep >= cfg_.budget;
}

namespace {

// Fringe identity is its set of goals; goals inside a fringe are unique, so
// equal sizes plus containment suffices.
bool same_goal_set(const std::vector<Goal>& a, const std::vector<Goal>& b) {
    if (a.size() != b.size()) return false;
    for (const Goal& g : a)
        if (std::none_of(b.begin(), b.end(), [&](const Goal& h) { return h == g; }))
            return false;
    return true;
}

}  // namespace

StepResult Env::step(const Action& a) {
    if (done()) throw std::logic_error("step on a finished episode");
    if (a.fringe_idx < 0 || a.fringe_idx >= static_cast<int>(state_.fringes.size()))
        throw std::invalid_argument("fringe index out of range");
    const Fringe& src = state_.fringes[a.fringe_idx];
    if (a.goal_idx < 0 || a.goal_idx >= static_cast<int>(src.goals.size()))
        throw std::invalid_argument("goal index out of range");

    std::vector<Term> term_args;
    if (a.term_arg) term_args.push_back(*a.term_arg);
    std::vector<Theorem> thm_args;
    thm_args.reserve(a.theorem_args.size());
    for (int idx : a.theorem_args) {
        if (idx < 0 || idx >= static_cast<int>(library_->size()))
            throw std::invalid_argument("theorem argument index out of range");
        thm_args.push_back((*library_)[idx]);
    }

    const Goal& target_goal = src.goals[a.goal_idx];
    TacticOutcome out = apply_tactic(target_goal, a.tactic, term_args, thm_args, cfg_.fuel);

    state_.timestep += 1;

    auto finish = [&](OutcomeKind kind) {
        StepResult r;
        r.outcome = kind;
        switch (kind) {
            case OutcomeKind::Proved:
                r.reward = tracker_->rate(target_.name) > tracker_->mean_rate() ? cfg_.r_easy
                                                                                : cfg_.r_hard;
                break;
            case OutcomeKind::BudgetExhausted: r.reward = cfg_.r_fail; break;
            case OutcomeKind::Progress: r.reward = cfg_.r_progress; break;
            case OutcomeKind::SubgoalSolved: r.reward = cfg_.r_subgoal; break;
            case OutcomeKind::NoOp: r.reward = cfg_.r_other; break;
        }
        r.done = done();
        return r;
    };

    if (!out.is_subgoals()) {
        return finish(state_.timestep >= cfg_.budget ? OutcomeKind::BudgetExhausted
                                                     : OutcomeKind::NoOp);
    }

    // Replace goal j with the new subgoals in place, dropping any that the
    // fringe already carries.
    std::vector<Goal> next;
    next.reserve(src.goals.size() + out.subgoals.size());
    auto already_present = [&](const Goal& g) {
        for (int k = 0; k < static_cast<int>(src.goals.size()); ++k)
            if (k != a.goal_idx && src.goals[k] == g) return true;
        return false;
    };
    for (int k = 0; k < a.goal_idx; ++k) next.push_back(src.goals[k]);
    for (const Goal& g : out.subgoals)
        if (!already_present(g)) next.push_back(g);
    for (int k = a.goal_idx + 1; k < static_cast<int>(src.goals.size()); ++k)
        next.push_back(src.goals[k]);

    if (next.empty()) {
        Action prov = a;
        state_.fringes.push_back(Fringe{std::move(next), prov});
        return finish(OutcomeKind::Proved);
    }

    for (const Fringe& f : state_.fringes)
        if (same_goal_set(f.goals, next))
            return finish(state_.timestep >= cfg_.budget ? OutcomeKind::BudgetExhausted
                                                         : OutcomeKind::NoOp);

    bool shrank = next.size() < src.goals.size();
    state_.fringes.push_back(Fringe{std::move(next), a});
    if (state_.timestep >= cfg_.budget) return finish(OutcomeKind::BudgetExhausted);
    return finish(shrank ? OutcomeKind::SubgoalSolved : OutcomeKind::Progress);
}

}  // namespace prover
