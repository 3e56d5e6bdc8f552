#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "prover/policy.hpp"
#include "prover/proof.hpp"

namespace prover {

enum class StrategyKind { Learned, Bfs, Dfs, LatestFringe, Untrained };
enum class ChoiceMode { Stochastic, TopK };

struct StrategySpec {
    StrategyKind kind = StrategyKind::Learned;
    ChoiceMode mode = ChoiceMode::Stochastic;
    int b = 1;  // tactic choices per expansion (Bfs/Dfs only)
};

// "bfs:topk:2", "dfs:stochastic:3", "learned", "latest", "untrained", ...
// Mode and branching default to stochastic / 1 when omitted. parse_strategy
// throws std::invalid_argument on anything else.
std::string strategy_name(const StrategySpec& spec);
StrategySpec parse_strategy(const std::string& text);

struct RolloutResult {
    bool proved = false;
    int timesteps = 0;
    int proof_length = 0;  // reconstructed script steps; 0 unless proved
    std::optional<ProofScript> proof;
    std::optional<MdpState> final_state;  // always set on return
};

// One budgeted proof-search episode under the given strategy. `params` are
// used as-is; callers realize Untrained by passing freshly initialized ones.
// Arguments are always sampled stochastically; `spec.mode` only governs the
// tactic choice (and, for Learned/Untrained, the fringe choice stays
// stochastic by construction of the policy).
RolloutResult run_strategy(const Theorem& target, const std::vector<Theorem>& library,
                           const Policy& policy, const ad::ParamStore& params,
                           const StrategySpec& spec, const EpisodeConfig& ep, Rng& rng);

struct AblationRow {
    std::string strategy;
    int attempted = 0;
    int proved = 0;
    double mean_timesteps = 0.0;     // over proved theorems
    double mean_proof_length = 0.0;  // over proved theorems
    // name -> (timesteps, proof steps) for proved theorems only
    std::map<std::string, std::pair<int, int>> per_theorem;
};

// Attempts every target once. The per-theorem rng stream depends only on
// (seed, theorem index), so different strategies see identical streams.
AblationRow run_ablation_row(const std::vector<Theorem>& targets,
                             const std::vector<Theorem>& library, const Policy& policy,
                             const ad::ParamStore& params, const StrategySpec& spec,
                             const EpisodeConfig& ep, uint64_t seed);

// Fixed-width text table, one row per entry.
std::string ablation_table(const std::vector<AblationRow>& rows);

}  // namespace prover
