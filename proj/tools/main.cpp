#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prover/corpus.hpp"
#include "prover/learner.hpp"
#include "prover/parse.hpp"
#include "prover/proof.hpp"
#include "prover/strategies.hpp"

namespace {

using namespace prover;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;  // goal unproved / replay failed
constexpr int kExitUsage = 2;   // bad flags, unreadable files, malformed input

struct CommonOpts {
    std::string corpus_path;
    std::string checkpoint_path;
    uint64_t seed = 0;
    int budget = 50;
    long fuel = 1000;
    double split_ratio = 0.8;
    uint64_t split_seed = 0;
    std::string eval_on = "test";  // test | train | all
};

struct ModelOpts {
    int d = 64;
    int hidden = 64;
    int L = 5;
};

struct TrainOpts {
    double gamma = 0.99;
    double lr = 5e-5;
    int iterations = 100;
    int episodes_per_iteration = 0;
    int workers = 1;
    int pretrain_epochs = 0;
    double pretrain_lr = 1e-2;
    bool no_replay = false;
    bool baseline = false;
    int checkpoint_every = 0;
    std::string metrics_path = "metrics.jsonl";
    std::string checkpoint_out = "checkpoint.json";
};

void add_config_file(CLI::App* cmd, std::string& path) {
    cmd->add_option("--config", path, "Read options from a key=value config file; flags override");
}

// Fill in options the command line left unset from a key=value file.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config file '" + path + "': cannot open");
    for (const CLI::ConfigItem& item : cmd->get_config_formatter()->from_config(in)) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        CLI::Option* opt = cmd->get_option_no_throw("--" + item.fullname());
        if (opt == nullptr)
            throw std::runtime_error("config file '" + path + "': unknown key '" +
                                     item.fullname() + "'");
        if (!opt->empty()) continue;  // flags override the file
        if (opt->get_expected_min() == 0) {
            std::string v = item.inputs.empty() ? "true" : item.inputs.back();
            opt->add_result(opt->get_flag_value("--" + item.fullname(), v));
        } else {
            for (const std::string& v : item.inputs) opt->add_result(v);
        }
        opt->run_callback();
    }
}

void add_split_opts(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--split", c.split_ratio, "Train fraction of the corpus")
        ->check(CLI::Range(0.0001, 0.9999))
        ->capture_default_str();
    cmd->add_option("--split-seed", c.split_seed, "Seed for the corpus split shuffle")
        ->capture_default_str();
    cmd->add_option("--on", c.eval_on, "Which side of the split to use")
        ->check(CLI::IsMember({"test", "train", "all"}))
        ->capture_default_str();
}

void add_model_opts(CLI::App* cmd, ModelOpts& m) {
    cmd->add_option("-d,--dim", m.d, "Encoding width")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--hidden", m.hidden, "Head hidden width")->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("-L,--max-args", m.L, "Max sampled arguments per tactic")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

std::vector<Theorem> read_corpus(const std::string& path) {
    if (path.empty()) throw CLI::ValidationError("--corpus", "a corpus file is required");
    return load_corpus(path);
}

std::vector<Theorem> pick_split(const std::vector<Theorem>& corpus, const CommonOpts& c) {
    if (c.eval_on == "all") return corpus;
    auto [train, test] = split_corpus(corpus, c.split_ratio, c.split_seed);
    return c.eval_on == "train" ? train : test;
}

struct Model {
    Policy policy;
    ad::ParamStore params;
};

Model model_from_checkpoint(const std::string& path) {
    if (path.empty()) throw CLI::ValidationError("--checkpoint", "a checkpoint file is required");
    Checkpoint ck = load_checkpoint(path);
    Policy policy(EncoderModel{Vocab::from_tokens(ck.vocab), ck.policy.d}, ck.policy);
    ad::ParamStore params;
    for (const auto& [name, values] : ck.params) params.create(name, values.size()) = values;
    return {std::move(policy), std::move(params)};
}

Model fresh_model(const std::vector<Theorem>& corpus, const ModelOpts& m, uint64_t seed) {
    Policy policy(EncoderModel{Vocab::from_corpus(corpus), m.d},
                  PolicyConfig{m.d, m.hidden, m.L});
    ad::ParamStore params;
    Rng rng(seed);
    policy.init_params(params, rng);
    return {std::move(policy), std::move(params)};
}

// Reinitialized parameters with the checkpoint's shape, for untrained rows.
Model untrained_like(const Model& model, uint64_t seed) {
    Model fresh{model.policy, {}};
    Rng rng(seed);
    fresh.policy.init_params(fresh.params, rng);
    return fresh;
}

EpisodeConfig episode_config(const CommonOpts& c) {
    EpisodeConfig ep;
    ep.budget = c.budget;
    ep.fuel = c.fuel;
    return ep;
}

int cmd_gen_corpus(const std::string& out, const CorpusConfig& cfg) {
    std::vector<Theorem> corpus = generate_corpus(cfg);
    save_corpus(corpus, out);
    std::cout << "wrote " << corpus.size() << " theorems to " << out << "\n";
    return kExitOk;
}

int cmd_train(const CommonOpts& c, const ModelOpts& m, const TrainOpts& t) {
    std::vector<Theorem> corpus = read_corpus(c.corpus_path);
    auto [train_split, test_split] = split_corpus(corpus, c.split_ratio, c.split_seed);

    LearnerConfig cfg;
    cfg.iterations = t.iterations;
    cfg.episodes_per_iteration = t.episodes_per_iteration;
    cfg.gamma = t.gamma;
    cfg.lr = t.lr;
    cfg.budget = c.budget;
    cfg.fuel = c.fuel;
    cfg.seed = c.seed;
    cfg.workers = t.workers;
    cfg.replay = !t.no_replay;
    cfg.baseline = t.baseline;
    cfg.pretrain_epochs = t.pretrain_epochs;
    cfg.pretrain_lr = t.pretrain_lr;
    cfg.checkpoint_every = t.checkpoint_every;
    cfg.checkpoint_path = t.checkpoint_out;

    Learner learner(corpus, train_split, PolicyConfig{m.d, m.hidden, m.L}, cfg);
    learner.init();

    std::ofstream metrics(t.metrics_path);
    if (!metrics) throw std::runtime_error("cannot write metrics file '" + t.metrics_path + "'");
    std::vector<IterationStats> history = learner.train(&metrics);

    std::cout << "trained " << history.size() << " iterations on " << train_split.size()
              << " theorems (" << test_split.size() << " held out)\n";
    if (!history.empty()) {
        const IterationStats& last = history.back();
        std::cout << "final train proof_rate " << last.proof_rate << ", mean_return "
                  << last.mean_return << "\n";
    }
    std::cout << "checkpoint -> " << t.checkpoint_out << "\nmetrics -> " << t.metrics_path
              << "\n";
    return kExitOk;
}

int cmd_eval(const CommonOpts& c) {
    std::vector<Theorem> corpus = read_corpus(c.corpus_path);
    Model model = model_from_checkpoint(c.checkpoint_path);
    std::vector<Theorem> targets = pick_split(corpus, c);
    EvalReport rep = evaluate(targets, corpus, model.policy, model.params, episode_config(c),
                              c.seed);
    std::cout << "proved " << rep.proved << "/" << rep.attempted << "\n";
    std::cout << "mean_timesteps " << rep.mean_timesteps << "\n";
    std::cout << "mean_proof_length " << rep.mean_proof_length << "\n";
    return kExitOk;
}

int cmd_ablate(const CommonOpts& c, const std::string& strategies_csv,
               const std::string& json_out) {
    std::vector<Theorem> corpus = read_corpus(c.corpus_path);
    Model model = model_from_checkpoint(c.checkpoint_path);
    std::vector<Theorem> targets = pick_split(corpus, c);

    std::vector<StrategySpec> specs;
    std::stringstream ss(strategies_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) specs.push_back(parse_strategy(item));
    }
    if (specs.empty()) throw CLI::ValidationError("--strategies", "no strategy specs given");

    std::vector<AblationRow> rows;
    for (const StrategySpec& spec : specs) {
        const bool untrained = spec.kind == StrategyKind::Untrained;
        Model fresh = untrained ? untrained_like(model, c.seed) : Model{model.policy, {}};
        const ad::ParamStore& params = untrained ? fresh.params : model.params;
        rows.push_back(run_ablation_row(targets, corpus, model.policy, params, spec,
                                        episode_config(c), c.seed));
    }
    std::cout << ablation_table(rows);

    if (!json_out.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for (const AblationRow& r : rows) {
            nlohmann::json row;
            row["strategy"] = r.strategy;
            row["attempted"] = r.attempted;
            row["proved"] = r.proved;
            row["mean_timesteps"] = r.mean_timesteps;
            row["mean_proof_length"] = r.mean_proof_length;
            nlohmann::json per = nlohmann::json::object();
            for (const auto& [name, tl] : r.per_theorem)
                per[name] = {{"timesteps", tl.first}, {"proof_length", tl.second}};
            row["per_theorem"] = per;
            j.push_back(row);
        }
        std::ofstream out(json_out);
        if (!out) throw std::runtime_error("cannot write '" + json_out + "'");
        out << j.dump(2) << "\n";
    }
    return kExitOk;
}

int cmd_prove(const CommonOpts& c, const ModelOpts& m, const std::string& goal_text,
              const std::string& strategy, const std::string& script_out, int attempts) {
    std::vector<Theorem> corpus;
    if (!c.corpus_path.empty()) corpus = load_corpus(c.corpus_path);

    std::optional<Model> model;
    if (!c.checkpoint_path.empty()) {
        model.emplace(model_from_checkpoint(c.checkpoint_path));
    } else {
        // untrained parameters; vocabulary from the corpus when given, else
        // from the goal itself
        if (corpus.empty()) {
            Term stmt = parse_term(goal_text);
            std::vector<std::string> vars = free_vars(stmt);
            Policy policy(EncoderModel{Vocab(vars), m.d}, PolicyConfig{m.d, m.hidden, m.L});
            ad::ParamStore params;
            Rng rng(c.seed);
            policy.init_params(params, rng);
            model.emplace(Model{std::move(policy), std::move(params)});
        } else {
            model.emplace(fresh_model(corpus, m, c.seed));
        }
    }

    Theorem target{"goal", parse_term(goal_text), "goal", static_cast<int>(corpus.size())};
    StrategySpec spec = parse_strategy(strategy);
    std::optional<RolloutResult> proof_run;
    for (int k = 0; k < attempts && !proof_run; ++k) {
        Rng rng = Rng::from_components(
            {c.seed, static_cast<uint64_t>(target.index), static_cast<uint64_t>(k)});
        RolloutResult rr = run_strategy(target, corpus, model->policy, model->params, spec,
                                        episode_config(c), rng);
        if (rr.proved) proof_run = std::move(rr);
    }
    if (!proof_run) {
        std::cerr << "unproved: " << attempts << " attempt(s) at budget " << c.budget << "\n";
        return kExitDomain;
    }
    std::string text = proof_run->proof->to_text();
    std::cout << text;
    if (!script_out.empty()) {
        std::ofstream out(script_out);
        if (!out) throw std::runtime_error("cannot write '" + script_out + "'");
        out << text;
    }
    return kExitOk;
}

int cmd_replay(const CommonOpts& c, const std::string& script_path) {
    std::ifstream in(script_path);
    if (!in) throw std::runtime_error("cannot read script '" + script_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    ProofScript script = parse_proof_script(buf.str());

    std::vector<Theorem> corpus;
    if (!c.corpus_path.empty()) corpus = load_corpus(c.corpus_path);

    ReplayResult rep = replay_script(script, corpus, c.fuel);
    if (!rep.ok) {
        std::cerr << "replay failed: " << rep.error << "\n";
        return kExitDomain;
    }
    std::cout << "replayed " << rep.steps << " steps; goal closed\n";
    return kExitOk;
}

int cmd_export_dot(const CommonOpts& c, const ModelOpts& m, const std::string& goal_text,
                   const std::string& theorem_name, const std::string& strategy,
                   const std::string& out_path) {
    std::vector<Theorem> corpus;
    if (!c.corpus_path.empty()) corpus = load_corpus(c.corpus_path);

    std::optional<Theorem> target;
    if (!theorem_name.empty()) {
        for (const Theorem& t : corpus)
            if (t.name == theorem_name) target = t;
        if (!target)
            throw std::runtime_error("theorem '" + theorem_name + "' not found in the corpus");
    } else if (!goal_text.empty()) {
        target = Theorem{"goal", parse_term(goal_text), "goal", static_cast<int>(corpus.size())};
    } else {
        throw CLI::ValidationError("export-dot", "one of --goal or --theorem is required");
    }

    std::optional<Model> model;
    if (!c.checkpoint_path.empty()) model.emplace(model_from_checkpoint(c.checkpoint_path));
    else if (!corpus.empty()) model.emplace(fresh_model(corpus, m, c.seed));
    else {
        std::vector<std::string> vars = free_vars(target->statement);
        Policy policy(EncoderModel{Vocab(vars), m.d}, PolicyConfig{m.d, m.hidden, m.L});
        ad::ParamStore params;
        Rng rng(c.seed);
        policy.init_params(params, rng);
        model.emplace(Model{std::move(policy), std::move(params)});
    }

    StrategySpec spec = parse_strategy(strategy);
    Rng rng = Rng::from_components({c.seed, static_cast<uint64_t>(target->index)});
    RolloutResult rr =
        run_strategy(*target, corpus, model->policy, model->params, spec, episode_config(c), rng);
    std::string dot = export_search_graph(*rr.final_state);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << dot;
    std::cout << (rr.proved ? "proved" : "unproved") << "; " << rr.final_state->fringes.size()
              << " fringes -> " << out_path << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fringe-based tactic prover with a REINFORCE-trained policy"};
    app.require_subcommand(1);

    CommonOpts common;
    ModelOpts model_opts;
    TrainOpts train_opts;
    std::string config_path;

    // gen-corpus
    CorpusConfig gen_cfg;
    std::string gen_out = "corpus.jsonl";
    CLI::App* gen = app.add_subcommand("gen-corpus", "Generate a tautology corpus");
    add_config_file(gen, config_path);
    gen->add_option("-o,--out", gen_out, "Output JSONL path")->capture_default_str();
    gen->add_option("-n,--count", gen_cfg.n, "Number of theorems")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen->add_option("--max-vars", gen_cfg.max_vars, "Variables per theory")
        ->check(CLI::Range(1, 8))
        ->capture_default_str();
    gen->add_option("--max-depth", gen_cfg.max_depth, "Max connective depth")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen->add_option("--theories", gen_cfg.theory_count, "Number of theory namespaces")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    gen->add_option("--seed", gen_cfg.seed, "Generator seed")->capture_default_str();

    auto add_common = [&](CLI::App* cmd, bool with_checkpoint) {
        add_config_file(cmd, config_path);
        cmd->add_option("--corpus", common.corpus_path, "Corpus JSONL path");
        if (with_checkpoint)
            cmd->add_option("--checkpoint", common.checkpoint_path, "Trained checkpoint path");
        cmd->add_option("--seed", common.seed, "Run seed")->capture_default_str();
        cmd->add_option("--budget", common.budget, "Episode step budget")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--fuel", common.fuel, "Tactic fuel (deterministic timeout)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };

    // train
    CLI::App* train = app.add_subcommand("train", "Train the policy with REINFORCE");
    add_common(train, false);
    add_split_opts(train, common);
    add_model_opts(train, model_opts);
    train->add_option("--gamma", train_opts.gamma, "Discount factor")
        ->check(CLI::Range(0.0001, 1.0))
        ->capture_default_str();
    train->add_option("--lr", train_opts.lr, "RMSProp learning rate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train->add_option("--iterations", train_opts.iterations, "Training iterations")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    train->add_option("--episodes-per-iteration", train_opts.episodes_per_iteration,
                      "0 = the whole train split each iteration")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    train->add_option("--workers", train_opts.workers, "Rollout worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train->add_option("--pretrain-epochs", train_opts.pretrain_epochs,
                      "Encoder autoencoding warm-up epochs")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    train->add_option("--pretrain-lr", train_opts.pretrain_lr, "Warm-up learning rate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    train->add_flag("--no-replay", train_opts.no_replay, "Disable guided proof replays");
    train->add_flag("--baseline", train_opts.baseline,
                    "Subtract a moving-average return baseline");
    train->add_option("--checkpoint-every", train_opts.checkpoint_every,
                      "Also checkpoint every K iterations (0 = final only)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    train->add_option("--checkpoint-out", train_opts.checkpoint_out, "Checkpoint output path")
        ->capture_default_str();
    train->add_option("--metrics", train_opts.metrics_path, "Metrics JSONL output path")
        ->capture_default_str();

    // eval
    CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a corpus split");
    add_common(eval, true);
    add_split_opts(eval, common);

    // ablate
    std::string strategies_csv = "learned,bfs:topk:2,dfs:topk:2,latest,untrained";
    std::string ablate_json;
    CLI::App* ablate = app.add_subcommand("ablate", "Compare search strategies");
    add_common(ablate, true);
    add_split_opts(ablate, common);
    ablate->add_option("--strategies", strategies_csv, "Comma-separated strategy specs")
        ->capture_default_str();
    ablate->add_option("--json", ablate_json, "Also write rows as JSON");

    // prove
    std::string goal_text;
    std::string prove_strategy = "learned";
    std::string script_out;
    int prove_attempts = 4;
    CLI::App* prove = app.add_subcommand("prove", "Prove one goal and print the tactic script");
    prove->add_option("goal", goal_text, "Goal formula, e.g. \"p /\\ q ==> p /\\ q\"")
        ->required();
    add_common(prove, true);
    add_model_opts(prove, model_opts);
    prove->add_option("--strategy", prove_strategy, "Search strategy spec")
        ->capture_default_str();
    prove->add_option("--attempts", prove_attempts, "Seeded episodes to try before giving up")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    prove->add_option("--out", script_out, "Also write the script to a file");

    // replay
    std::string script_path;
    CLI::App* replay = app.add_subcommand("replay", "Verify a proof script through the kernel");
    replay->add_option("script", script_path, "Proof script file")->required();
    add_common(replay, false);

    // export-dot
    std::string dot_goal, dot_theorem, dot_out = "search.dot";
    std::string dot_strategy = "learned";
    CLI::App* export_dot = app.add_subcommand("export-dot", "Export a search graph as DOT");
    add_common(export_dot, true);
    add_model_opts(export_dot, model_opts);
    export_dot->add_option("--goal", dot_goal, "Goal formula to search");
    export_dot->add_option("--theorem", dot_theorem, "Corpus theorem name to search");
    export_dot->add_option("--strategy", dot_strategy, "Search strategy spec")
        ->capture_default_str();
    export_dot->add_option("-o,--out", dot_out, "DOT output path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (!config_path.empty())
            for (CLI::App* sub : app.get_subcommands()) apply_config_file(sub, config_path);
        if (gen->parsed()) return cmd_gen_corpus(gen_out, gen_cfg);
        if (train->parsed()) return cmd_train(common, model_opts, train_opts);
        if (eval->parsed()) return cmd_eval(common);
        if (ablate->parsed()) return cmd_ablate(common, strategies_csv, ablate_json);
        if (prove->parsed())
            return cmd_prove(common, model_opts, goal_text, prove_strategy, script_out,
                             prove_attempts);
        if (replay->parsed()) return cmd_replay(common, script_path);
        if (export_dot->parsed())
            return cmd_export_dot(common, model_opts, dot_goal, dot_theorem, dot_strategy,
                                  dot_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
