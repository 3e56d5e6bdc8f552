#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prover/goal.hpp"
#include "prover/term.hpp"

namespace prover {

// Truth-table validity checks, bit-parallel: each uint64_t block carries the
// term's value under 64 variable assignments at once. Terms with more than 24
// variables are rejected (2^24 assignments = 256k blocks, still instant; more
// than that and you want a SAT solver, which Metis provides).
inline constexpr int kMaxOracleVars = 24;

bool is_tautology(const Term& t);

// Validity of assumptions |- conclusion, i.e. tautology of the implication
// chain view.
bool is_valid_goal(const Goal& g);

// Evaluate under one assignment (var name -> value); missing names read as
// false. The slow path backing the bit-parallel version's tests.
bool eval_term(const Term& t, const std::vector<std::pair<std::string, bool>>& env);

}  // namespace prover
