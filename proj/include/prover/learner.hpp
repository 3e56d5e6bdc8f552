#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prover/optim.hpp"
#include "prover/policy.hpp"
#include "prover/strategies.hpp"

namespace prover {

// G_t = r_t + gamma * G_{t+1}, computed right to left.
std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma);

struct LearnerConfig {
    int iterations = 100;
    int episodes_per_iteration = 0;  // 0 = every training theorem once per iteration
    double gamma = 0.99;
    double lr = 5e-5;
    int budget = 50;
    long fuel = 1000;
    uint64_t seed = 0;
    int workers = 1;
    bool replay = true;     // guided replays of buffered proofs on failure
    bool baseline = false;  // subtract a moving-average return baseline
    int pretrain_epochs = 0;
    double pretrain_lr = 1e-2;
    int checkpoint_every = 0;     // 0 = final checkpoint only
    std::string checkpoint_path;  // empty = train() writes no checkpoints
};

// The newest successful proof chains per theorem; at most kCapacity each,
// newest first.
class ReplayBuffer {
public:
    static constexpr std::size_t kCapacity = 5;

    void record_success(const std::string& theorem, std::vector<Action> chain);
    // Null when the theorem has no stored proofs.
    const std::deque<std::vector<Action>>* find(const std::string& theorem) const;
    void drop(const std::string& theorem, std::size_t pos);
    std::size_t stored(const std::string& theorem) const;

private:
    std::map<std::string, std::deque<std::vector<Action>>> buf_;
};

struct IterationStats {
    int iteration = 0;
    double proof_rate = 0.0;   // proved / attempted, real episodes only
    double mean_return = 0.0;  // mean discounted return of real episodes
    double loss = 0.0;         // batch surrogate: -sum over trajectories of G_t*logpi
    std::vector<std::string> proved_ids;

    // One metrics line (stable field order, no timing fields, so equal runs
    // produce byte-identical logs).
    std::string to_json_line() const;
};

struct EvalReport {
    int attempted = 0;
    int proved = 0;
    double mean_timesteps = 0.0;     // over proved theorems
    double mean_proof_length = 0.0;  // over proved theorems
    std::vector<std::string> proved_names;
};

struct Checkpoint {
    int version = 1;
    int iteration = 0;
    PolicyConfig policy;
    LearnerConfig config;
    std::vector<std::string> vocab;
    std::map<std::string, std::vector<double>> params;
    std::map<std::string, std::vector<double>> opt_acc;
    std::string rng_state;
    std::map<std::string, double> tracker_rates;
    double baseline = 0.0;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
// Throws std::runtime_error on missing/malformed files or version mismatch.
Checkpoint load_checkpoint(const std::string& path);

// REINFORCE over proof-search episodes. The full corpus is the premise
// library; episodes roll only on the training subset. Per-episode rng streams
// are derived from (seed, iteration, theorem index), the difficulty tracker
// and replay buffer are frozen for the length of an iteration and updated in
// theorem order afterwards, so training is deterministic for any worker
// count.
class Learner {
public:
    Learner(std::vector<Theorem> corpus, std::vector<Theorem> train, PolicyConfig pcfg,
            LearnerConfig cfg);

    // Fresh parameters, plus encoder pretraining when configured.
    void init();
    void restore(const Checkpoint& ck);

    // One pass: episodes, replays, a single optimizer step, tracker update.
    // Throws std::runtime_error on a non-finite loss.
    IterationStats run_iteration(int iteration);
    // cfg.iterations passes from iteration `start`; writes one metrics line
    // per iteration to `metrics` when non-null and checkpoints per config.
    std::vector<IterationStats> train(std::ostream* metrics, int start = 0);

    Checkpoint make_checkpoint(int iteration) const;

    const Policy& policy() const { return *policy_; }
    const ad::ParamStore& params() const { return params_; }
    ad::ParamStore& params() { return params_; }
    const DifficultyTracker& tracker() const { return tracker_; }
    DifficultyTracker& tracker() { return tracker_; }
    ReplayBuffer& replay_buffer() { return replays_; }
    const std::vector<Theorem>& corpus() const { return corpus_; }
    const std::vector<Theorem>& train_set() const { return train_; }

private:
    struct EpisodeOut {
        bool proved = false;
        bool replayed = false;
        int steps = 0;
        double g0 = 0.0;
        double loss = 0.0;
        bool finite = true;
        ad::GradStore grads;
        std::vector<Action> chain;       // minimal proof chain when proved
        std::vector<std::size_t> stale;  // replay entries that failed to re-execute
    };

    EpisodeOut roll_episode(const Theorem& target, int iteration,
                            const DifficultyTracker& tracker,
                            const std::deque<std::vector<Action>>* replays) const;
    std::vector<int> pick_episodes(int iteration) const;

    std::vector<Theorem> corpus_;
    std::vector<Theorem> train_;
    PolicyConfig pcfg_;
    LearnerConfig cfg_;
    std::optional<Policy> policy_;
    ad::ParamStore params_;
    ad::RmsProp opt_;
    DifficultyTracker tracker_;
    ReplayBuffer replays_;
    Rng master_rng_;
    double baseline_ = 0.0;
};

// One stochastic attempt per target under the learned policy; proofs are
// reconstructed (their length is the replayed script's step count). The rng
// stream per theorem depends only on (seed, theorem index).
EvalReport evaluate(const std::vector<Theorem>& targets, const std::vector<Theorem>& library,
                    const Policy& policy, const ad::ParamStore& params, const EpisodeConfig& ep,
                    uint64_t seed);

}  // namespace prover
