#pragma once

#include <map>
#include <optional>
#include <vector>

#include "prover/goal.hpp"
#include "prover/tactic.hpp"
#include "prover/theorem.hpp"

namespace prover {

struct EpisodeConfig {
    int budget = 50;
    double r_easy = 5.0;      // proved, theorem easier than average
    double r_hard = 15.0;     // proved, theorem at or below average
    double r_fail = -5.0;     // budget exhausted
    double r_progress = 0.1;  // new fringe, nothing closed
    double r_subgoal = 0.2;   // new fringe with a goal closed, proof unfinished
    double r_other = -0.1;    // state unchanged
    long fuel = 1000;
};

// The 4-tuple (i, j, tactic, c). Theorem arguments are indices into the
// library; the term argument serves CaseOn.
struct Action {
    int fringe_idx = 0;
    int goal_idx = 0;
    TacticId tactic = TacticId::StripTac;
    std::vector<int> theorem_args;
    std::optional<Term> term_arg;
};

struct Fringe {
    std::vector<Goal> goals;
    std::optional<Action> parent;  // absent only for fringe 0
};

struct MdpState {
    std::vector<Fringe> fringes;
    int timestep = 0;
    Goal main_goal;
};

enum class OutcomeKind { Proved, Progress, SubgoalSolved, NoOp, BudgetExhausted };

const char* outcome_name(OutcomeKind k);

struct StepResult {
    double reward = 0.0;
    bool done = false;
    OutcomeKind outcome = OutcomeKind::NoOp;
};

// Per-theorem prove-rate, exponentially averaged with factor 0.9 per episode.
// The mean runs over theorems with at least one recorded episode this run.
class DifficultyTracker {
public:
    double rate(const std::string& theorem) const;
    double mean_rate() const;
    void record(const std::string& theorem, bool proved);
    std::size_t seen() const { return rates_.size(); }
    void clear() { rates_.clear(); }
    const std::map<std::string, double>& rates() const { return rates_; }
    void set_rate(const std::string& theorem, double r) { rates_[theorem] = r; }

private:
    std::map<std::string, double> rates_;
};

// One proof-search episode over a single theorem. The tracker is read for
// terminal rewards; updating it after the episode is the caller's business.
class Env {
public:
    Env(const Theorem& target, const std::vector<Theorem>& library, EpisodeConfig cfg,
        const DifficultyTracker& tracker);

    const MdpState& state() const { return state_; }
    const Theorem& target() const { return target_; }
    const std::vector<Theorem>& library() const { return *library_; }
    const EpisodeConfig& config() const { return cfg_; }

    bool done() const;
    bool proved() const { return proved_fringe().has_value(); }
    std::optional<int> proved_fringe() const;

    // Throws std::invalid_argument on malformed actions (bad indices,
    // argument kind mismatch) and std::logic_error when already done.
    StepResult step(const Action& a);

private:
    Theorem target_;
    const std::vector<Theorem>* library_;
    EpisodeConfig cfg_;
    const DifficultyTracker* tracker_;
    MdpState state_;
};

}  // namespace prover
