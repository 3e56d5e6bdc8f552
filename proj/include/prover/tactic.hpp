#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prover/goal.hpp"
#include "prover/theorem.hpp"

namespace prover {

// Enum order is the tactic-head output index; D = kNumTactics.
enum class TacticId : uint8_t {
    StripTac = 0,
    EqTac = 1,
    CaseOn = 2,
    Simp = 3,
    Fs = 4,
    Rw = 5,
    Metis = 6,
    Drule = 7,
    Irule = 8,
};

inline constexpr int kNumTactics = 9;

enum class ArgKind : uint8_t { None, SingleTerm, SingleTheorem, TheoremList };

ArgKind arg_kind(TacticId t);
const char* tactic_name(TacticId t);  // external spelling: strip_tac, simp, ...
std::optional<TacticId> tactic_from_name(std::string_view name);

struct TacticOutcome {
    enum class Kind : uint8_t { Subgoals, NoChange, Failed, FuelExhausted };

    Kind kind;
    std::vector<Goal> subgoals;  // Kind::Subgoals only; deduplicated, ordered
    std::string reason;          // Kind::Failed only

    static TacticOutcome make_subgoals(std::vector<Goal> gs);
    static TacticOutcome no_change() { return {Kind::NoChange, {}, {}}; }
    static TacticOutcome failed(std::string why) { return {Kind::Failed, {}, std::move(why)}; }
    static TacticOutcome fuel_exhausted() { return {Kind::FuelExhausted, {}, {}}; }

    bool is_subgoals() const { return kind == Kind::Subgoals; }
    bool proved() const { return kind == Kind::Subgoals && subgoals.empty(); }
};

// Applies tactic t to g. term_args/thm_args must conform to arg_kind(t)
// (throws std::invalid_argument otherwise, as does fuel <= 0). Deterministic;
// theorem arguments are assumed to be valid statements — soundness of
// rewriting/Drule/Irule is conditional on that.
TacticOutcome apply_tactic(const Goal& g, TacticId t, const std::vector<Term>& term_args,
                           const std::vector<Theorem>& thm_args, long fuel);

// Argument candidates per arg kind: variables free in the goal for
// CaseOn; for theorem tactics, library entries that precede target_index and
// whose theory is mentioned by the goal (a goal mentions theory X when some
// free variable carries prefix "X_").
struct Candidates {
    ArgKind kind;
    std::vector<Term> terms;           // SingleTerm
    std::vector<int> theorem_indices;  // Single/ListTheorem: indices into library
};

Candidates candidate_arguments(const Goal& g, TacticId t, const std::vector<Theorem>& library,
                               int target_index);

std::string theory_of_var(const std::string& var_name);

}  // namespace prover
