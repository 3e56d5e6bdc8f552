#include "prover/learner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "prover/proof.hpp"

namespace prover {

std::vector<double> discounted_returns(const std::vector<double>& rewards, double gamma) {
    std::vector<double> g(rewards.size());
    double acc = 0.0;
    for (std::size_t i = rewards.size(); i-- > 0;) {
        acc = rewards[i] + gamma * acc;
        g[i] = acc;
    }
    return g;
}

void ReplayBuffer::record_success(const std::string& theorem, std::vector<Action> chain) {
    auto& q = buf_[theorem];
    q.push_front(std::move(chain));
    while (q.size() > kCapacity) q.pop_back();
}

const std::deque<std::vector<Action>>* ReplayBuffer::find(const std::string& theorem) const {
    auto it = buf_.find(theorem);
    if (it == buf_.end() || it->second.empty()) return nullptr;
    return &it->second;
}

void ReplayBuffer::drop(const std::string& theorem, std::size_t pos) {
    auto it = buf_.find(theorem);
    if (it == buf_.end() || pos >= it->second.size()) return;
    it->second.erase(it->second.begin() + static_cast<std::ptrdiff_t>(pos));
    if (it->second.empty()) buf_.erase(it);
}

std::size_t ReplayBuffer::stored(const std::string& theorem) const {
    auto it = buf_.find(theorem);
    return it == buf_.end() ? 0 : it->second.size();
}

std::string IterationStats::to_json_line() const {
    nlohmann::json j;
    j["iteration"] = iteration;
    j["loss"] = loss;
    j["mean_return"] = mean_return;
    j["proof_rate"] = proof_rate;
    j["proved_ids"] = proved_ids;
    return j.dump();
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    nlohmann::json j;
    j["version"] = ck.version;
    j["iteration"] = ck.iteration;
    j["policy"] = {{"d", ck.policy.d}, {"hidden", ck.policy.hidden}, {"L", ck.policy.L}};
    j["config"] = {{"iterations", ck.config.iterations},
                   {"episodes_per_iteration", ck.config.episodes_per_iteration},
                   {"gamma", ck.config.gamma},
                   {"lr", ck.config.lr},
                   {"budget", ck.config.budget},
                   {"fuel", ck.config.fuel},
                   {"seed", ck.config.seed},
                   {"workers", ck.config.workers},
                   {"replay", ck.config.replay},
                   {"baseline", ck.config.baseline},
                   {"pretrain_epochs", ck.config.pretrain_epochs},
                   {"pretrain_lr", ck.config.pretrain_lr}};
    j["vocab"] = ck.vocab;
    j["params"] = ck.params;
    j["opt_acc"] = ck.opt_acc;
    j["rng_state"] = ck.rng_state;
    j["tracker"] = ck.tracker_rates;
    j["baseline_value"] = ck.baseline;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    out << j.dump() << "\n";
    if (!out) throw std::runtime_error("write failed for checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("checkpoint '" + path + "': " + e.what());
    }
    Checkpoint ck;
    try {
        ck.version = j.at("version").get<int>();
        if (ck.version != 1)
            throw std::runtime_error("unsupported checkpoint version " +
                                     std::to_string(ck.version));
        ck.iteration = j.at("iteration").get<int>();
        const auto& p = j.at("policy");
        ck.policy.d = p.at("d").get<int>();
        ck.policy.hidden = p.at("hidden").get<int>();
        ck.policy.L = p.at("L").get<int>();
        const auto& c = j.at("config");
        ck.config.iterations = c.at("iterations").get<int>();
        ck.config.episodes_per_iteration = c.at("episodes_per_iteration").get<int>();
        ck.config.gamma = c.at("gamma").get<double>();
        ck.config.lr = c.at("lr").get<double>();
        ck.config.budget = c.at("budget").get<int>();
        ck.config.fuel = c.at("fuel").get<long>();
        ck.config.seed = c.at("seed").get<uint64_t>();
        ck.config.workers = c.at("workers").get<int>();
        ck.config.replay = c.at("replay").get<bool>();
        ck.config.baseline = c.at("baseline").get<bool>();
        ck.config.pretrain_epochs = c.at("pretrain_epochs").get<int>();
        ck.config.pretrain_lr = c.at("pretrain_lr").get<double>();
        ck.vocab = j.at("vocab").get<std::vector<std::string>>();
        ck.params = j.at("params").get<std::map<std::string, std::vector<double>>>();
        ck.opt_acc = j.at("opt_acc").get<std::map<std::string, std::vector<double>>>();
        ck.rng_state = j.at("rng_state").get<std::string>();
        ck.tracker_rates = j.at("tracker").get<std::map<std::string, double>>();
        ck.baseline = j.at("baseline_value").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("checkpoint '" + path + "': " + e.what());
    }
    return ck;
}

Learner::Learner(std::vector<Theorem> corpus, std::vector<Theorem> train, PolicyConfig pcfg,
                 LearnerConfig cfg)
    : corpus_(std::move(corpus)),
      train_(std::move(train)),
      pcfg_(pcfg),
      cfg_(cfg),
      master_rng_(cfg.seed) {
    for (const Theorem& t : train_) {
        if (t.index < 0 || t.index >= static_cast<int>(corpus_.size()) ||
            corpus_[static_cast<std::size_t>(t.index)].name != t.name)
            throw std::invalid_argument("training theorem '" + t.name +
                                        "' is not part of the corpus");
    }
}

void Learner::init() {
    Vocab vocab = Vocab::from_corpus(corpus_);
    policy_.emplace(EncoderModel{vocab, pcfg_.d}, pcfg_);
    params_ = ad::ParamStore();
    opt_ = ad::RmsProp({cfg_.lr, 0.99, 1e-8});
    policy_->init_params(params_, master_rng_);
    if (cfg_.pretrain_epochs > 0) {
        std::vector<Term> statements;
        statements.reserve(corpus_.size());
        for (const Theorem& t : corpus_) statements.push_back(t.statement);
        pretrain_reconstruction(policy_->encoder(), params_, statements, cfg_.pretrain_epochs,
                                cfg_.pretrain_lr, master_rng_);
    }
    tracker_.clear();
    baseline_ = 0.0;
}

void Learner::restore(const Checkpoint& ck) {
    pcfg_ = ck.policy;
    Vocab vocab = Vocab::from_tokens(ck.vocab);
    policy_.emplace(EncoderModel{vocab, pcfg_.d}, pcfg_);
    params_ = ad::ParamStore();
    for (const auto& [name, values] : ck.params) {
        std::vector<double>& dst = params_.create(name, values.size());
        dst = values;
    }
    opt_ = ad::RmsProp({cfg_.lr, 0.99, 1e-8});
    opt_.accumulators() = ck.opt_acc;
    tracker_.clear();
    for (const auto& [name, rate] : ck.tracker_rates) tracker_.set_rate(name, rate);
    master_rng_.set_state(ck.rng_state);
    baseline_ = ck.baseline;
}

Checkpoint Learner::make_checkpoint(int iteration) const {
    if (!policy_) throw std::logic_error("make_checkpoint before init/restore");
    Checkpoint ck;
    ck.iteration = iteration;
    ck.policy = pcfg_;
    ck.config = cfg_;
    ck.vocab = policy_->encoder().vocab.tokens();
    ck.params = params_.entries();
    ck.opt_acc = opt_.accumulators();
    ck.rng_state = master_rng_.state();
    ck.tracker_rates = tracker_.rates();
    ck.baseline = baseline_;
    return ck;
}

namespace {

// -sum_m (G_m - base) * logpi_m as a tape node.
ad::NodeId surrogate_loss(ad::Tape& tape, const std::vector<ad::NodeId>& lps,
                          const std::vector<double>& returns, double base) {
    std::vector<ad::NodeId> terms;
    terms.reserve(lps.size());
    for (std::size_t m = 0; m < lps.size(); ++m)
        terms.push_back(tape.scale(lps[m], -(returns[m] - base)));
    return tape.sum(tape.pack(terms));
}

}  // namespace

Learner::EpisodeOut Learner::roll_episode(const Theorem& target, int iteration,
                                          const DifficultyTracker& tracker,
                                          const std::deque<std::vector<Action>>* replays) const {
    EpisodeOut out;
    Rng rng = Rng::from_components(
        {cfg_.seed, static_cast<uint64_t>(iteration), static_cast<uint64_t>(target.index)});
    EpisodeConfig ep;
    ep.budget = cfg_.budget;
    ep.fuel = cfg_.fuel;

    PolicyRun run(*policy_, params_, corpus_, target.index);

    Env env(target, corpus_, ep, tracker);
    std::vector<ad::NodeId> lps;
    std::vector<double> rewards;
    while (!env.done()) {
        SampledAction sa = run.sample(env.state(), rng);
        StepResult sr = env.step(sa.action);
        lps.push_back(sa.log_prob);
        rewards.push_back(sr.reward);
    }
    out.proved = env.proved();
    out.steps = env.state().timestep;
    std::vector<double> returns = discounted_returns(rewards, cfg_.gamma);
    out.g0 = returns.empty() ? 0.0 : returns[0];
    if (!lps.empty()) {
        ad::NodeId loss = surrogate_loss(run.tape(), lps, returns, cfg_.baseline ? baseline_ : 0.0);
        double lv = run.tape().scalar(loss);
        out.loss += lv;
        if (!std::isfinite(lv)) {
            out.finite = false;
            return out;
        }
        run.tape().backward(loss, 1.0, out.grads);
    }
    if (out.proved) {
        out.chain = proof_chain_actions(env.state());
        return out;
    }

    // Failed: walk the policy through one buffered proof of this theorem so
    // the gradient still carries a positive signal. A chain that no longer
    // replays (changed corpus/config) is reported stale and dropped.
    if (!cfg_.replay || !replays) return out;
    std::size_t pick = rng.below(replays->size());
    const std::vector<Action>& chain = (*replays)[pick];
    Env renv(target, corpus_, ep, tracker);
    std::vector<ad::NodeId> rlps;
    std::vector<double> rrewards;
    bool ok = true;
    try {
        for (const Action& a : chain) {
            if (renv.done()) {
                ok = false;
                break;
            }
            ad::NodeId lp = run.log_prob_of(renv.state(), a);
            StepResult sr = renv.step(a);
            rlps.push_back(lp);
            rrewards.push_back(sr.reward);
        }
    } catch (const std::exception&) {
        ok = false;
    }
    if (!ok || !renv.proved()) {
        out.stale.push_back(pick);
        return out;
    }
    std::vector<double> rreturns = discounted_returns(rrewards, cfg_.gamma);
    ad::NodeId rloss =
        surrogate_loss(run.tape(), rlps, rreturns, cfg_.baseline ? baseline_ : 0.0);
    double rlv = run.tape().scalar(rloss);
    out.loss += rlv;
    if (!std::isfinite(rlv)) {
        out.finite = false;
        return out;
    }
    run.tape().backward(rloss, 1.0, out.grads);
    out.replayed = true;
    return out;
}

std::vector<int> Learner::pick_episodes(int iteration) const {
    std::vector<int> order(train_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    int limit = cfg_.episodes_per_iteration;
    if (limit <= 0 || limit >= static_cast<int>(train_.size())) return order;
    Rng rng = Rng::from_components({cfg_.seed, static_cast<uint64_t>(iteration), 0x5e1ec7u});
    rng.shuffle(order);
    order.resize(static_cast<std::size_t>(limit));
    std::sort(order.begin(), order.end());
    return order;
}

IterationStats Learner::run_iteration(int iteration) {
    if (!policy_) throw std::logic_error("run_iteration before init/restore");
    std::vector<int> picks = pick_episodes(iteration);
    const std::size_t n = picks.size();

    // Snapshots frozen for the whole iteration: episodes never observe
    // sibling outcomes, which keeps any worker count equivalent to serial.
    const DifficultyTracker tracker_snapshot = tracker_;
    std::vector<const std::deque<std::vector<Action>>*> entries(n);
    for (std::size_t i = 0; i < n; ++i)
        entries[i] = replays_.find(train_[static_cast<std::size_t>(picks[i])].name);

    std::vector<EpisodeOut> outs(n);
    auto work = [&](int w, int stride) {
        for (std::size_t i = static_cast<std::size_t>(w); i < n;
             i += static_cast<std::size_t>(stride))
            outs[i] = roll_episode(train_[static_cast<std::size_t>(picks[i])], iteration,
                                   tracker_snapshot, entries[i]);
    };
    int workers = std::max(1, cfg_.workers);
    if (workers == 1 || n <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
        for (std::thread& t : pool) t.join();
    }

    IterationStats stats;
    stats.iteration = iteration;
    ad::GradStore total;
    double return_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Theorem& t = train_[static_cast<std::size_t>(picks[i])];
        EpisodeOut& out = outs[i];
        if (!out.finite) {
            std::ostringstream os;
            os << "training aborted: non-finite loss at iteration " << iteration
               << " on theorem '" << t.name << "' (loss=" << out.loss
               << ", steps=" << out.steps << ")";
            throw std::runtime_error(os.str());
        }
        stats.loss += out.loss;
        return_sum += out.g0;
        if (out.proved) stats.proved_ids.push_back(t.name);
        for (const auto& [name, g] : out.grads.entries()) total.acc(name, g.data(), g.size());
    }
    if (n > 0) {
        stats.proof_rate = static_cast<double>(stats.proved_ids.size()) / static_cast<double>(n);
        stats.mean_return = return_sum / static_cast<double>(n);
    }
    std::sort(stats.proved_ids.begin(), stats.proved_ids.end());

    if (!total.empty()) opt_.step(params_, total);

    // Deferred mutations, applied in episode order.
    for (std::size_t i = 0; i < n; ++i) {
        const Theorem& t = train_[static_cast<std::size_t>(picks[i])];
        EpisodeOut& out = outs[i];
        // Stale entries are dropped back to front so indices stay valid.
        std::sort(out.stale.rbegin(), out.stale.rend());
        for (std::size_t pos : out.stale) replays_.drop(t.name, pos);
        if (out.proved) replays_.record_success(t.name, std::move(out.chain));
        tracker_.record(t.name, out.proved);
    }
    if (cfg_.baseline) baseline_ = 0.9 * baseline_ + 0.1 * stats.mean_return;
    return stats;
}

std::vector<IterationStats> Learner::train(std::ostream* metrics, int start) {
    std::vector<IterationStats> history;
    history.reserve(static_cast<std::size_t>(std::max(0, cfg_.iterations)));
    if (cfg_.iterations <= 0) {
        if (!cfg_.checkpoint_path.empty())
            save_checkpoint(make_checkpoint(start), cfg_.checkpoint_path);
        return history;
    }
    for (int k = 0; k < cfg_.iterations; ++k) {
        int it = start + k;
        IterationStats stats = run_iteration(it);
        if (metrics) {
            *metrics << stats.to_json_line() << "\n";
            metrics->flush();
        }
        history.push_back(std::move(stats));
        bool last = k + 1 == cfg_.iterations;
        bool periodic = cfg_.checkpoint_every > 0 && (k + 1) % cfg_.checkpoint_every == 0;
        if (!cfg_.checkpoint_path.empty() && (last || periodic))
            save_checkpoint(make_checkpoint(it + 1), cfg_.checkpoint_path);
    }
    return history;
}

EvalReport evaluate(const std::vector<Theorem>& targets, const std::vector<Theorem>& library,
                    const Policy& policy, const ad::ParamStore& params, const EpisodeConfig& ep,
                    uint64_t seed) {
    EvalReport report;
    report.attempted = static_cast<int>(targets.size());
    double steps_sum = 0.0, len_sum = 0.0;
    StrategySpec spec{StrategyKind::Learned, ChoiceMode::Stochastic, 1};
    for (const Theorem& t : targets) {
        Rng rng = Rng::from_components({seed, static_cast<uint64_t>(t.index)});
        RolloutResult rr = run_strategy(t, library, policy, params, spec, ep, rng);
        if (!rr.proved) continue;
        report.proved += 1;
        report.proved_names.push_back(t.name);
        steps_sum += rr.timesteps;
        len_sum += rr.proof_length;
    }
    if (report.proved > 0) {
        report.mean_timesteps = steps_sum / report.proved;
        report.mean_proof_length = len_sum / report.proved;
    }
    return report;
}

}  // namespace prover
