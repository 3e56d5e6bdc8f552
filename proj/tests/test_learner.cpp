#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "prover/corpus.hpp"
#include "prover/learner.hpp"
#include "prover/optim.hpp"
#include "prover/parse.hpp"
#include "prover/proof.hpp"

using namespace prover;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const char* name) : path(std::string("/tmp/") + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

std::vector<Theorem> small_corpus(uint64_t seed = 7, int n = 10) {
    CorpusConfig cfg;
    cfg.seed = seed;
    cfg.n = n;
    cfg.max_vars = 3;
    cfg.max_depth = 3;
    cfg.theory_count = 2;
    return generate_corpus(cfg);
}

PolicyConfig small_policy_cfg() { return PolicyConfig{8, 8, 3}; }

LearnerConfig fast_learner_cfg() {
    LearnerConfig cfg;
    cfg.iterations = 2;
    cfg.gamma = 0.99;
    cfg.lr = 1e-3;
    cfg.budget = 10;
    cfg.fuel = 400;
    cfg.seed = 5;
    return cfg;
}

// A short recorded trajectory on a fixed theorem, for gradient tests.
struct Recorded {
    std::vector<Theorem> lib;
    Theorem target;
    std::vector<Action> actions;
    std::vector<double> rewards;

    Recorded() : lib(small_corpus()), target(lib[6]) {}
};

Recorded record_trajectory(const Policy& pol, const ad::ParamStore& ps, int budget) {
    Recorded rec;
    DifficultyTracker tr;
    EpisodeConfig ep;
    ep.budget = budget;
    Env env(rec.target, rec.lib, ep, tr);
    PolicyRun run(pol, ps, rec.lib, rec.target.index);
    Rng rng(99);
    while (!env.done()) {
        SampledAction sa = run.sample(env.state(), rng);
        StepResult sr = env.step(sa.action);
        rec.actions.push_back(sa.action);
        rec.rewards.push_back(sr.reward);
    }
    return rec;
}

// -sum G_m * logpi of the recorded actions under the current parameters.
double replay_loss(const Policy& pol, const ad::ParamStore& ps, const Recorded& rec,
                   const std::vector<double>& returns, ad::GradStore* grads) {
    DifficultyTracker tr;
    EpisodeConfig ep;
    ep.budget = static_cast<int>(rec.actions.size()) + 1;
    Env env(rec.target, rec.lib, ep, tr);
    PolicyRun run(pol, ps, rec.lib, rec.target.index);
    std::vector<ad::NodeId> terms;
    for (std::size_t m = 0; m < rec.actions.size(); ++m) {
        ad::NodeId lp = run.log_prob_of(env.state(), rec.actions[m]);
        terms.push_back(run.tape().scale(lp, -returns[m]));
        env.step(rec.actions[m]);
    }
    ad::NodeId loss = run.tape().sum(run.tape().pack(terms));
    if (grads) run.tape().backward(loss, 1.0, *grads);
    return run.tape().scalar(loss);
}

}  // namespace

TEST_CASE("discounted returns match hand computation") {
    std::vector<double> g = discounted_returns({-0.1, -0.1, 15.0}, 0.99);
    REQUIRE(g.size() == 3);
    CHECK(std::abs(g[0] - 14.5025) <= 1e-9);
    CHECK(std::abs(g[1] - 14.75) <= 1e-9);
    CHECK(std::abs(g[2] - 15.0) <= 1e-9);

    CHECK(discounted_returns({1.0, 1.0}, 1.0) == std::vector<double>{2.0, 1.0});
    CHECK(discounted_returns({-5.0}, 0.5) == std::vector<double>{-5.0});
    CHECK(discounted_returns({}, 0.99).empty());

    // recurrence identity on an arbitrary reward stream
    Rng rng(3);
    std::vector<double> rewards;
    for (int i = 0; i < 20; ++i) rewards.push_back(rng.uniform() * 4.0 - 2.0);
    std::vector<double> gs = discounted_returns(rewards, 0.97);
    for (std::size_t m = 0; m + 1 < gs.size(); ++m)
        CHECK(gs[m] == doctest::Approx(rewards[m] + 0.97 * gs[m + 1]).epsilon(1e-12));
}

TEST_CASE("replay buffer keeps the five newest proofs") {
    ReplayBuffer buf;
    CHECK(buf.find("x") == nullptr);
    CHECK(buf.stored("x") == 0);
    buf.drop("x", 0);  // absent: no effect

    auto chain_tagged = [](int tag) {
        return std::vector<Action>{Action{tag, 0, TacticId::StripTac, {}, std::nullopt}};
    };
    for (int i = 0; i < 7; ++i) buf.record_success("x", chain_tagged(i));
    const auto* q = buf.find("x");
    REQUIRE(q != nullptr);
    REQUIRE(q->size() == ReplayBuffer::kCapacity);
    // newest first; 0 and 1 were evicted
    for (std::size_t k = 0; k < q->size(); ++k)
        CHECK((*q)[k][0].fringe_idx == 6 - static_cast<int>(k));

    buf.drop("x", 1);  // removes the chain tagged 5
    q = buf.find("x");
    REQUIRE(q->size() == 4);
    CHECK((*q)[0][0].fringe_idx == 6);
    CHECK((*q)[1][0].fringe_idx == 4);

    for (int k = 0; k < 4; ++k) buf.drop("x", 0);
    CHECK(buf.find("x") == nullptr);
}

TEST_CASE("episode surrogate loss gradient matches finite differences") {
    Policy pol(EncoderModel{Vocab::from_corpus(small_corpus()), 6}, PolicyConfig{6, 6, 3});
    ad::ParamStore ps;
    Rng rng(21);
    pol.init_params(ps, rng);

    Recorded rec = record_trajectory(pol, ps, 6);
    REQUIRE(!rec.actions.empty());
    std::vector<double> returns = discounted_returns(rec.rewards, 0.99);

    ad::GradStore grads;
    replay_loss(pol, ps, rec, returns, &grads);
    auto f = [&]() { return replay_loss(pol, ps, rec, returns, nullptr); };
    Rng pick(77);
    ad::FdReport rep = ad::finite_diff_check(ps, f, grads, 40, pick);
    INFO((rep.failures.empty() ? std::string("ok") : rep.failures[0]));
    CHECK(rep.ok());
    CHECK(rep.coords_checked == 40);
}

TEST_CASE("zero returns leave parameters unchanged") {
    Policy pol(EncoderModel{Vocab::from_corpus(small_corpus()), 6}, PolicyConfig{6, 6, 3});
    ad::ParamStore ps;
    Rng rng(22);
    pol.init_params(ps, rng);
    Recorded rec = record_trajectory(pol, ps, 5);
    REQUIRE(!rec.actions.empty());

    std::vector<double> zeros(rec.actions.size(), 0.0);
    ad::GradStore grads;
    double loss = replay_loss(pol, ps, rec, zeros, &grads);
    CHECK(loss == 0.0);
    for (const auto& [name, g] : grads.entries())
        for (double v : g) CHECK(v == 0.0);

    std::map<std::string, std::vector<double>> before = ps.entries();
    ad::RmsProp opt({1e-3, 0.99, 1e-8});
    opt.step(ps, grads);
    CHECK(ps.entries() == before);
}

TEST_CASE("identical trajectories contribute exactly double the gradient") {
    Policy pol(EncoderModel{Vocab::from_corpus(small_corpus()), 6}, PolicyConfig{6, 6, 3});
    ad::ParamStore ps;
    Rng rng(23);
    pol.init_params(ps, rng);
    Recorded rec = record_trajectory(pol, ps, 5);
    std::vector<double> returns = discounted_returns(rec.rewards, 0.99);

    ad::GradStore once, twice;
    replay_loss(pol, ps, rec, returns, &once);
    replay_loss(pol, ps, rec, returns, &twice);
    replay_loss(pol, ps, rec, returns, &twice);

    REQUIRE(!once.entries().empty());
    for (const auto& [name, g1] : once.entries()) {
        const std::vector<double>* g2 = twice.find(name);
        REQUIRE(g2 != nullptr);
        REQUIRE(g2->size() == g1.size());
        for (std::size_t i = 0; i < g1.size(); ++i) CHECK((*g2)[i] == 2.0 * g1[i]);
    }
}

TEST_CASE("training is deterministic for equal seeds and any worker count") {
    std::vector<Theorem> corpus = small_corpus(11, 8);
    LearnerConfig cfg = fast_learner_cfg();
    cfg.pretrain_epochs = 2;
    cfg.pretrain_lr = 1e-2;

    auto run_one = [&](int workers) {
        LearnerConfig c = cfg;
        c.workers = workers;
        Learner ln(corpus, corpus, small_policy_cfg(), c);
        ln.init();
        std::ostringstream metrics;
        ln.train(&metrics);
        return std::make_pair(metrics.str(), ln.params().entries());
    };

    auto [log1, params1] = run_one(1);
    auto [log2, params2] = run_one(1);
    auto [log3, params3] = run_one(3);

    CHECK(!log1.empty());
    CHECK(log1 == log2);
    CHECK(params1 == params2);
    CHECK(log1 == log3);
    CHECK(params1 == params3);

    // two iterations of metrics, one JSON object per line
    std::istringstream in(log1);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        CHECK(line.find("\"iteration\":") != std::string::npos);
        CHECK(line.find("\"proof_rate\":") != std::string::npos);
        CHECK(line.find("wallclock") == std::string::npos);
    }
    CHECK(lines == 2);
}

TEST_CASE("metrics lines have a fixed layout") {
    IterationStats st;
    st.iteration = 3;
    st.proof_rate = 0.5;
    st.mean_return = 2.25;
    st.loss = -1.5;
    st.proved_ids = {"a", "b"};
    CHECK(st.to_json_line() ==
          "{\"iteration\":3,\"loss\":-1.5,\"mean_return\":2.25,\"proof_rate\":0.5,"
          "\"proved_ids\":[\"a\",\"b\"]}");
}

TEST_CASE("an iteration updates tracker and replay buffer consistently") {
    std::vector<Theorem> corpus = small_corpus(13, 10);
    LearnerConfig cfg = fast_learner_cfg();
    cfg.seed = 2;
    Learner ln(corpus, corpus, small_policy_cfg(), cfg);
    ln.init();
    IterationStats stats = ln.run_iteration(0);

    REQUIRE(!stats.proved_ids.empty());
    REQUIRE(stats.proved_ids.size() < corpus.size());
    CHECK(stats.proof_rate ==
          doctest::Approx(static_cast<double>(stats.proved_ids.size()) / corpus.size()));
    CHECK(ln.tracker().seen() == corpus.size());

    for (const Theorem& t : corpus) {
        bool proved = std::find(stats.proved_ids.begin(), stats.proved_ids.end(), t.name) !=
                      stats.proved_ids.end();
        CHECK(ln.tracker().rate(t.name) == doctest::Approx(proved ? 0.1 : 0.0));
        CHECK(ln.replay_buffer().stored(t.name) == (proved ? 1u : 0u));
        if (!proved) continue;

        // the buffered chain re-executes to a proof from a fresh state
        const auto* q = ln.replay_buffer().find(t.name);
        REQUIRE(q != nullptr);
        DifficultyTracker tr;
        EpisodeConfig ep;
        ep.budget = cfg.budget;
        ep.fuel = cfg.fuel;
        Env env(t, corpus, ep, tr);
        for (const Action& a : (*q)[0]) env.step(a);
        CHECK(env.proved());
    }
}

TEST_CASE("stale replay entries are dropped, fresh proofs buffered") {
    std::vector<Theorem> corpus = small_corpus(13, 10);
    LearnerConfig cfg = fast_learner_cfg();
    cfg.seed = 2;
    cfg.budget = 6;
    Learner ln(corpus, corpus, small_policy_cfg(), cfg);
    ln.init();
    // a chain that cannot replay: theorem argument index out of range
    std::vector<Action> garbage{Action{0, 0, TacticId::Metis, {9999}, std::nullopt}};
    for (const Theorem& t : corpus) ln.replay_buffer().record_success(t.name, garbage);

    IterationStats stats = ln.run_iteration(0);
    REQUIRE(!stats.proved_ids.empty());
    REQUIRE(stats.proved_ids.size() < corpus.size());
    for (const Theorem& t : corpus) {
        bool proved = std::find(stats.proved_ids.begin(), stats.proved_ids.end(), t.name) !=
                      stats.proved_ids.end();
        if (proved) {
            // replay never ran; the new proof sits in front of the stale entry
            REQUIRE(ln.replay_buffer().stored(t.name) == 2);
        } else {
            // replay was attempted, found the entry stale, and dropped it
            CHECK(ln.replay_buffer().stored(t.name) == 0);
        }
    }
}

TEST_CASE("episode subsets per iteration are honored") {
    std::vector<Theorem> corpus = small_corpus(17, 9);
    LearnerConfig cfg = fast_learner_cfg();
    cfg.episodes_per_iteration = 4;
    Learner ln(corpus, corpus, small_policy_cfg(), cfg);
    ln.init();
    ln.run_iteration(0);
    CHECK(ln.tracker().seen() == 4);
}

TEST_CASE("checkpoints round-trip and resume identically") {
    TempFile ck_file("learner_ck_test.json");
    std::vector<Theorem> corpus = small_corpus(19, 8);
    LearnerConfig cfg = fast_learner_cfg();
    cfg.iterations = 2;
    // the replay buffer is intentionally not part of a checkpoint, so exact
    // resume equality is only defined with replays off
    cfg.replay = false;

    Learner ln(corpus, corpus, small_policy_cfg(), cfg);
    ln.init();
    ln.train(nullptr);
    Checkpoint ck = ln.make_checkpoint(2);
    save_checkpoint(ck, ck_file.path);
    Checkpoint back = load_checkpoint(ck_file.path);

    CHECK(back.version == 1);
    CHECK(back.iteration == 2);
    CHECK(back.policy.d == ck.policy.d);
    CHECK(back.policy.hidden == ck.policy.hidden);
    CHECK(back.policy.L == ck.policy.L);
    CHECK(back.vocab == ck.vocab);
    CHECK(back.params == ck.params);  // bitwise: doubles survive the JSON round-trip
    CHECK(back.opt_acc == ck.opt_acc);
    CHECK(back.rng_state == ck.rng_state);
    CHECK(back.tracker_rates == ck.tracker_rates);
    CHECK(back.config.gamma == ck.config.gamma);
    CHECK(back.config.lr == ck.config.lr);
    CHECK(back.config.seed == ck.config.seed);

    // resuming from the checkpoint replays the original continuation exactly
    Learner resumed(corpus, corpus, small_policy_cfg(), cfg);
    resumed.restore(back);
    IterationStats from_restored = resumed.run_iteration(2);
    IterationStats from_original = ln.run_iteration(2);
    CHECK(from_restored.to_json_line() == from_original.to_json_line());
    CHECK(resumed.params().entries() == ln.params().entries());
}

TEST_CASE("zero iterations write only the initial checkpoint") {
    TempFile ck_file("learner_ck0_test.json");
    std::vector<Theorem> corpus = small_corpus(23, 6);
    LearnerConfig cfg = fast_learner_cfg();
    cfg.iterations = 0;
    cfg.checkpoint_path = ck_file.path;
    Learner ln(corpus, corpus, small_policy_cfg(), cfg);
    ln.init();
    std::ostringstream metrics;
    auto history = ln.train(&metrics);
    CHECK(history.empty());
    CHECK(metrics.str().empty());

    Checkpoint ck = load_checkpoint(ck_file.path);
    CHECK(ck.iteration == 0);
    CHECK(ck.params == ln.params().entries());
    CHECK(ck.tracker_rates.empty());
}

TEST_CASE("checkpoint loading rejects bad files") {
    CHECK_THROWS_AS(load_checkpoint("/tmp/definitely_missing_ck.json"), std::runtime_error);

    TempFile bad("learner_bad_ck.json");
    {
        std::ofstream out(bad.path);
        out << "{\"version\": 99}\n";
    }
    CHECK_THROWS_WITH_AS(load_checkpoint(bad.path),
                         doctest::Contains("unsupported checkpoint version"), std::runtime_error);

    TempFile garbled("learner_garbled_ck.json");
    {
        std::ofstream out(garbled.path);
        out << "not json at all\n";
    }
    CHECK_THROWS_AS(load_checkpoint(garbled.path), std::runtime_error);
}

TEST_CASE("evaluate reports replayable proofs deterministically") {
    std::vector<Theorem> corpus = small_corpus(29, 12);
    auto [train, test] = split_corpus(corpus, 0.5, 3);
    Policy pol(EncoderModel{Vocab::from_corpus(corpus), 8}, small_policy_cfg());
    ad::ParamStore ps;
    Rng rng(31);
    pol.init_params(ps, rng);

    EpisodeConfig ep;
    ep.budget = 30;
    EvalReport rep = evaluate(test, corpus, pol, ps, ep, 4);
    CHECK(rep.attempted == static_cast<int>(test.size()));
    REQUIRE(rep.proved >= 1);
    CHECK(rep.proved == static_cast<int>(rep.proved_names.size()));
    CHECK(rep.mean_timesteps > 0.0);
    CHECK(rep.mean_proof_length > 0.0);

    EvalReport again = evaluate(test, corpus, pol, ps, ep, 4);
    CHECK(again.proved == rep.proved);
    CHECK(again.proved_names == rep.proved_names);
    CHECK(again.mean_timesteps == rep.mean_timesteps);
    CHECK(again.mean_proof_length == rep.mean_proof_length);

    EvalReport empty = evaluate({}, corpus, pol, ps, ep, 4);
    CHECK(empty.attempted == 0);
    CHECK(empty.proved == 0);
    CHECK(empty.mean_timesteps == 0.0);
}

TEST_CASE("learner rejects training theorems outside the corpus") {
    std::vector<Theorem> corpus = small_corpus(7, 6);
    std::vector<Theorem> rogue = {Theorem{"ghost", parse_term("p \\/ ~p"), "t0", 3}};
    CHECK_THROWS_AS(Learner(corpus, rogue, small_policy_cfg(), fast_learner_cfg()),
                    std::invalid_argument);
}
