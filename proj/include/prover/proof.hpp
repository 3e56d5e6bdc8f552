#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prover/env.hpp"

namespace prover {

// A proof tree: the tactic applied to a goal and one subtree per subgoal it
// produced. Leaves are applications that closed their goal outright. Goals
// themselves are not stored; replay recomputes them from the statement.
struct ProofNode {
    TacticId tactic = TacticId::StripTac;
    std::vector<std::string> theorem_args;  // by name, resolved against the library
    std::optional<Term> term_arg;
    std::vector<ProofNode> children;
};

struct ProofScript {
    std::string theorem_name;
    Term statement;
    ProofNode root;

    std::string to_text() const;
};

// Walks provenance links from the terminal empty fringe back to fringe 0 and
// rebuilds the proof tree by re-running each recorded tactic (tactics are
// deterministic, so the recorded subgoal structure is reproduced exactly).
// Throws std::logic_error when the state holds no empty fringe.
ProofScript reconstruct_proof(const MdpState& state, const Theorem& target,
                              const std::vector<Theorem>& library, long fuel);

// Tactic applications in the script (the replayed step count).
int proof_size(const ProofNode& root);

// The action sequence along the provenance chain of the winning fringe, with
// fringe indices renumbered so that re-running the sequence from a fresh
// initial state recreates the proof (action k targets fringe k). Throws
// std::logic_error when the state holds no empty fringe.
std::vector<Action> proof_chain_actions(const MdpState& state);

// Inverse of ProofScript::to_text. Malformed input throws std::runtime_error
// with a line number.
ProofScript parse_proof_script(const std::string& text);

struct ReplayResult {
    bool ok = false;
    std::string error;  // names the failing step when !ok
    int steps = 0;      // tactic applications executed
};

// Re-executes the script through apply_tactic; ok iff every branch closes and
// the subgoal structure matches the script exactly.
ReplayResult replay_script(const ProofScript& script, const std::vector<Theorem>& library,
                           long fuel);

// The fringe tree in DOT format: one node per fringe, edges by provenance,
// proof-path fringes blue, dead ends red.
std::string export_search_graph(const MdpState& state);

}  // namespace prover
