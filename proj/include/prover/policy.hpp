#pragma once

#include <unordered_map>
#include <utility>
#include <vector>

#include "prover/encoder.hpp"
#include "prover/env.hpp"
#include "prover/tactic.hpp"

namespace prover {

struct PolicyConfig {
    int d = 64;       // encoding width (must match the encoder)
    int hidden = 64;  // head hidden width
    int L = 5;        // max sampled arguments for list-taking tactics
};

// An action together with the differentiable log-probability of having
// sampled it: log_prob = fringe_lp + tactic_lp + Σ arg_lps, summed in that
// order on the tape.
struct SampledAction {
    Action action;
    ad::NodeId log_prob;
    ad::NodeId fringe_lp;
    ad::NodeId tactic_lp;
    std::vector<ad::NodeId> arg_lps;
};

// The factorized policy: fringe choice by summed goal scores, tactic choice
// by a per-goal head, arguments by a recurrent pointer network over the
// candidate set. Owns parameter names: encoder ("emb.*"/"enc.*"), goal head
// "vgoal.*", tactic head "vtac.*", argument network "arg.*".
class Policy {
public:
    Policy(EncoderModel encoder, PolicyConfig cfg);

    void init_params(ad::ParamStore& ps, Rng& rng) const;
    const EncoderModel& encoder() const { return encoder_; }
    const PolicyConfig& config() const { return cfg_; }

private:
    EncoderModel encoder_;
    PolicyConfig cfg_;
};

// One proof episode's worth of policy evaluation on a single tape. Goal and
// premise encodings are cached per run, so repeated scoring of persistent
// fringes costs one encode per distinct goal. Bound to the episode's
// library/target because argument candidates depend on them.
class PolicyRun {
public:
    PolicyRun(const Policy& policy, const ad::ParamStore& params,
              const std::vector<Theorem>& library, int target_index);

    ad::Tape& tape() { return tape_; }

    ad::NodeId goal_vec(const Goal& g);
    ad::NodeId goal_score(const Goal& g);

    // Softmax over per-fringe sums of goal scores.
    std::vector<double> fringe_distribution(const MdpState& s);
    // Unmasked softmax over all tactics for one goal.
    std::vector<double> tactic_distribution(const Goal& g);
    // Tactics whose argument requirements are satisfiable on g, ascending.
    std::vector<TacticId> viable_tactics(const Goal& g);
    // The k most probable viable tactics, ties broken toward lower index.
    std::vector<TacticId> top_tactics(const Goal& g, int k);

    // Full factorized sample: fringe, goal 0, masked tactic, arguments.
    SampledAction sample(const MdpState& s, Rng& rng);
    // Log-prob of a recorded action under current parameters (for replays).
    // Throws std::runtime_error if the action is not representable.
    ad::NodeId log_prob_of(const MdpState& s, const Action& a);

    // Pieces for fixed search strategies (they choose fringes themselves).
    std::pair<TacticId, ad::NodeId> sample_tactic(const Goal& g, Rng& rng);
    // Arguments for t on g; fills theorem_args/term_arg of a bare action and
    // returns one log-prob node per sampled argument.
    std::pair<Action, std::vector<ad::NodeId>> sample_arguments(const Goal& g, TacticId t,
                                                                Rng& rng);

private:
    struct GoalInfo {
        ad::NodeId vec;
        ad::NodeId score;
        std::vector<Term> case_terms;
        std::vector<int> premise_indices;
        std::vector<TacticId> viable;
    };

    GoalInfo& info(const Goal& g);
    ad::NodeId premise_vec(int library_index);
    ad::NodeId term_vec(const Term& term);
    ad::NodeId fringe_logits(const MdpState& s);
    // Packed logits over viable tactics only, aligned with info(g).viable.
    ad::NodeId masked_tactic_logits(const Goal& g);

    // The argument pointer network: h0 = goal vec, step-0 input = tactic
    // embedding, then embeddings of chosen candidates; scores remaining
    // candidates each step, without replacement. Returns picked positions
    // into `cands` with their log-probs. When forced != nullptr the picks
    // are prescribed instead of sampled.
    std::vector<std::pair<int, ad::NodeId>> run_arg_net(ad::NodeId gvec, TacticId t,
                                                        const std::vector<ad::NodeId>& cands,
                                                        int steps, Rng* rng,
                                                        const std::vector<int>* forced);

    const Policy* policy_;
    const std::vector<Theorem>* library_;
    int target_index_;
    ad::Tape tape_;
    std::unordered_map<Goal, GoalInfo, GoalHash> goals_;
    std::unordered_map<int, ad::NodeId> premises_;
    std::unordered_map<Term, ad::NodeId, TermHash> terms_;
};

}  // namespace prover
