#include "prover/strategies.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace prover {

namespace {

const char* kind_word(StrategyKind k) {
    switch (k) {
        case StrategyKind::Learned: return "learned";
        case StrategyKind::Bfs: return "bfs";
        case StrategyKind::Dfs: return "dfs";
        case StrategyKind::LatestFringe: return "latest";
        case StrategyKind::Untrained: return "untrained";
    }
    return "?";
}

}  // namespace

std::string strategy_name(const StrategySpec& spec) {
    std::string s = kind_word(spec.kind);
    s += spec.mode == ChoiceMode::TopK ? ":topk" : ":stochastic";
    if (spec.kind == StrategyKind::Bfs || spec.kind == StrategyKind::Dfs)
        s += ":" + std::to_string(spec.b);
    return s;
}

StrategySpec parse_strategy(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);

    StrategySpec spec;
    if (parts[0] == "learned") spec.kind = StrategyKind::Learned;
    else if (parts[0] == "bfs") spec.kind = StrategyKind::Bfs;
    else if (parts[0] == "dfs") spec.kind = StrategyKind::Dfs;
    else if (parts[0] == "latest") spec.kind = StrategyKind::LatestFringe;
    else if (parts[0] == "untrained") spec.kind = StrategyKind::Untrained;
    else throw std::invalid_argument("unknown strategy '" + parts[0] + "'");

    std::size_t i = 1;
    if (i < parts.size() && (parts[i] == "topk" || parts[i] == "stochastic")) {
        spec.mode = parts[i] == "topk" ? ChoiceMode::TopK : ChoiceMode::Stochastic;
        ++i;
    }
    if (i < parts.size()) {
        try {
            std::size_t used = 0;
            spec.b = std::stoi(parts[i], &used);
            if (used != parts[i].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw std::invalid_argument("bad strategy component '" + parts[i] + "' in '" + text +
                                        "'");
        }
        if (spec.b < 1) throw std::invalid_argument("strategy branching must be >= 1");
        ++i;
    }
    if (i != parts.size())
        throw std::invalid_argument("bad strategy component '" + parts[i] + "' in '" + text + "'");
    return spec;
}

namespace {

// One tactic application at (fringe fi, goal 0); arguments sampled.
void apply_choice(Env& env, PolicyRun& run, int fi, const Goal& g, TacticId t, Rng& rng) {
    Action act = run.sample_arguments(g, t, rng).first;
    act.fringe_idx = fi;
    act.goal_idx = 0;
    env.step(act);
}

void rollout_policy(Env& env, PolicyRun& run, Rng& rng) {
    while (!env.done()) env.step(run.sample(env.state(), rng).action);
}

void rollout_latest(Env& env, PolicyRun& run, Rng& rng) {
    while (!env.done()) {
        int fi = static_cast<int>(env.state().fringes.size()) - 1;
        const Goal g = env.state().fringes[fi].goals[0];
        apply_choice(env, run, fi, g, run.sample_tactic(g, rng).first, rng);
    }
}

// Fringes are created in FIFO order, so expanding them by creation index
// visits the search tree level by level.
void rollout_bfs(Env& env, PolicyRun& run, const StrategySpec& spec, Rng& rng) {
    std::size_t next = 0;
    while (!env.done() && next < env.state().fringes.size()) {
        int fi = static_cast<int>(next++);
        const Goal g = env.state().fringes[fi].goals[0];
        std::vector<TacticId> picks;
        if (spec.mode == ChoiceMode::TopK) picks = run.top_tactics(g, spec.b);
        for (int k = 0; k < spec.b && !env.done(); ++k) {
            TacticId t;
            if (spec.mode == ChoiceMode::TopK) {
                if (k >= static_cast<int>(picks.size())) break;
                t = picks[k];
            } else {
                t = run.sample_tactic(g, rng).first;
            }
            apply_choice(env, run, fi, g, t, rng);
        }
    }
}

// Descends into each newly created fringe immediately; a round of b failed
// choices climbs exactly one level, and a second consecutive dead-end round
// (or a dead end at the root) ends the search.
void rollout_dfs(Env& env, PolicyRun& run, const StrategySpec& spec, Rng& rng) {
    int cur = 0;
    bool backtracked = false;
    while (!env.done()) {
        const Goal g = env.state().fringes[cur].goals[0];
        std::size_t before = env.state().fringes.size();
        std::vector<TacticId> picks;
        if (spec.mode == ChoiceMode::TopK) picks = run.top_tactics(g, spec.b);
        bool advanced = false;
        for (int k = 0; k < spec.b && !env.done(); ++k) {
            TacticId t;
            if (spec.mode == ChoiceMode::TopK) {
                if (k >= static_cast<int>(picks.size())) break;
                t = picks[k];
            } else {
                t = run.sample_tactic(g, rng).first;
            }
            apply_choice(env, run, cur, g, t, rng);
            if (env.state().fringes.size() > before) {
                advanced = true;
                break;
            }
        }
        if (env.done()) break;
        if (advanced) {
            cur = static_cast<int>(env.state().fringes.size()) - 1;
            backtracked = false;
            continue;
        }
        const auto& parent = env.state().fringes[cur].parent;
        if (backtracked || !parent) break;
        cur = parent->fringe_idx;
        backtracked = true;
    }
}

}  // namespace

RolloutResult run_strategy(const Theorem& target, const std::vector<Theorem>& library,
                           const Policy& policy, const ad::ParamStore& params,
                           const StrategySpec& spec, const EpisodeConfig& ep, Rng& rng) {
    DifficultyTracker tracker;  // rewards are ignored here; any tracker serves
    Env env(target, library, ep, tracker);
    PolicyRun run(policy, params, library, target.index);

    switch (spec.kind) {
        case StrategyKind::Learned:
        case StrategyKind::Untrained: rollout_policy(env, run, rng); break;
        case StrategyKind::LatestFringe: rollout_latest(env, run, rng); break;
        case StrategyKind::Bfs: rollout_bfs(env, run, spec, rng); break;
        case StrategyKind::Dfs: rollout_dfs(env, run, spec, rng); break;
    }

    RolloutResult rr;
    rr.proved = env.proved();
    rr.timesteps = env.state().timestep;
    if (rr.proved) {
        rr.proof = reconstruct_proof(env.state(), target, library, ep.fuel);
        rr.proof_length = proof_size(rr.proof->root);
    }
    rr.final_state = env.state();
    return rr;
}

AblationRow run_ablation_row(const std::vector<Theorem>& targets,
                             const std::vector<Theorem>& library, const Policy& policy,
                             const ad::ParamStore& params, const StrategySpec& spec,
                             const EpisodeConfig& ep, uint64_t seed) {
    AblationRow row;
    row.strategy = strategy_name(spec);
    row.attempted = static_cast<int>(targets.size());
    double steps_sum = 0.0, len_sum = 0.0;
    for (const Theorem& t : targets) {
        Rng rng = Rng::from_components({seed, static_cast<uint64_t>(t.index)});
        RolloutResult rr = run_strategy(t, library, policy, params, spec, ep, rng);
        if (!rr.proved) continue;
        row.proved += 1;
        steps_sum += rr.timesteps;
        len_sum += rr.proof_length;
        row.per_theorem[t.name] = {rr.timesteps, rr.proof_length};
    }
    if (row.proved > 0) {
        row.mean_timesteps = steps_sum / row.proved;
        row.mean_proof_length = len_sum / row.proved;
    }
    return row;
}

std::string ablation_table(const std::vector<AblationRow>& rows) {
    std::size_t name_w = 8;
    for (const AblationRow& r : rows) name_w = std::max(name_w, r.strategy.size());
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << std::left;
    os.width(static_cast<std::streamsize>(name_w));
    os << "strategy";
    os << "  proved  mean_timesteps  mean_proof_length\n";
    for (const AblationRow& r : rows) {
        os << std::left;
        os.width(static_cast<std::streamsize>(name_w));
        os << r.strategy;
        std::string proved = std::to_string(r.proved) + "/" + std::to_string(r.attempted);
        os << "  ";
        os << std::right;
        os.width(6);
        os << proved;
        os.width(16);
        if (r.proved > 0) os << r.mean_timesteps;
        else os << "-";
        os.width(19);
        if (r.proved > 0) os << r.mean_proof_length;
        else os << "-";
        os << "\n";
    }
    return os.str();
}

}  // namespace prover
