#include "prover/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prover {

Policy::Policy(EncoderModel encoder, PolicyConfig cfg)
    : encoder_(std::move(encoder)), cfg_(cfg) {
    if (encoder_.d != cfg_.d)
        throw std::invalid_argument("policy/encoder width mismatch");
    if (cfg_.L < 1) throw std::invalid_argument("L must be >= 1");
}

void Policy::init_params(ad::ParamStore& ps, Rng& rng) const {
    encoder_.init_params(ps, rng);
    nn::init_head(ps, "vgoal", cfg_.d, cfg_.hidden, 1, rng);
    nn::init_head(ps, "vtac", cfg_.d, cfg_.hidden, kNumTactics, rng);
    nn::init_gru(ps, "arg", cfg_.d, rng);
    ps.create_normal("arg.tacemb", static_cast<std::size_t>(kNumTactics) * cfg_.d, rng,
                     1.0 / std::sqrt(static_cast<double>(cfg_.d)));
    ps.create_normal("arg.score.Wh", static_cast<std::size_t>(cfg_.d) * cfg_.d, rng,
                     1.0 / std::sqrt(static_cast<double>(cfg_.d)));
    ps.create_normal("arg.score.Wc", static_cast<std::size_t>(cfg_.d) * cfg_.d, rng,
                     1.0 / std::sqrt(static_cast<double>(cfg_.d)));
    ps.create("arg.score.b", static_cast<std::size_t>(cfg_.d));
    ps.create_normal("arg.score.v", static_cast<std::size_t>(cfg_.d), rng,
                     1.0 / std::sqrt(static_cast<double>(cfg_.d)));
    ps.create("arg.score.b2", 1);
}

PolicyRun::PolicyRun(const Policy& policy, const ad::ParamStore& params,
                     const std::vector<Theorem>& library, int target_index)
    : policy_(&policy), library_(&library), target_index_(target_index), tape_(params) {}

PolicyRun::GoalInfo& PolicyRun::info(const Goal& g) {
    auto it = goals_.find(g);
    if (it != goals_.end()) return it->second;

    const PolicyConfig& cfg = policy_->config();
    GoalInfo gi{};
    gi.vec = policy_->encoder().encode_goal(tape_, g);
    gi.score = nn::head(tape_, "vgoal", gi.vec, cfg.d, cfg.hidden, 1);
    gi.case_terms = candidate_arguments(g, TacticId::CaseOn, *library_, target_index_).terms;
    gi.premise_indices =
        candidate_arguments(g, TacticId::Simp, *library_, target_index_).theorem_indices;
    for (int t = 0; t < kNumTactics; ++t) {
        auto id = static_cast<TacticId>(t);
        switch (arg_kind(id)) {
            case ArgKind::None: gi.viable.push_back(id); break;
            case ArgKind::SingleTerm:
                if (!gi.case_terms.empty()) gi.viable.push_back(id);
                break;
            default:
                if (!gi.premise_indices.empty()) gi.viable.push_back(id);
        }
    }
    return goals_.emplace(g, std::move(gi)).first->second;
}

ad::NodeId PolicyRun::goal_vec(const Goal& g) { return info(g).vec; }
ad::NodeId PolicyRun::goal_score(const Goal& g) { return info(g).score; }

ad::NodeId PolicyRun::premise_vec(int library_index) {
    auto it = premises_.find(library_index);
    if (it != premises_.end()) return it->second;
    ad::NodeId v = policy_->encoder().encode_term(
        tape_, library_->at(static_cast<std::size_t>(library_index)).statement);
    premises_.emplace(library_index, v);
    return v;
}

ad::NodeId PolicyRun::term_vec(const Term& term) {
    auto it = terms_.find(term);
    if (it != terms_.end()) return it->second;
    ad::NodeId v = policy_->encoder().encode_term(tape_, term);
    terms_.emplace(term, v);
    return v;
}

ad::NodeId PolicyRun::fringe_logits(const MdpState& s) {
    std::vector<ad::NodeId> per_fringe;
    per_fringe.reserve(s.fringes.size());
    for (const Fringe& f : s.fringes) {
        if (f.goals.empty())
            throw std::invalid_argument("policy evaluated on a terminal state");
        std::vector<ad::NodeId> scores;
        scores.reserve(f.goals.size());
        for (const Goal& g : f.goals) scores.push_back(goal_score(g));
        per_fringe.push_back(scores.size() == 1 ? scores[0]
                                                : tape_.sum(tape_.pack(scores)));
    }
    return tape_.pack(per_fringe);
}

ad::NodeId PolicyRun::masked_tactic_logits(const Goal& g) {
    GoalInfo& gi = info(g);
    const PolicyConfig& cfg = policy_->config();
    ad::NodeId all = nn::head(tape_, "vtac", gi.vec, cfg.d, cfg.hidden, kNumTactics);
    std::vector<ad::NodeId> kept;
    kept.reserve(gi.viable.size());
    for (TacticId t : gi.viable) kept.push_back(tape_.index(all, static_cast<int>(t)));
    return tape_.pack(kept);
}

std::vector<double> PolicyRun::fringe_distribution(const MdpState& s) {
    return tape_.softmax_values(fringe_logits(s));
}

std::vector<double> PolicyRun::tactic_distribution(const Goal& g) {
    const PolicyConfig& cfg = policy_->config();
    ad::NodeId all = nn::head(tape_, "vtac", info(g).vec, cfg.d, cfg.hidden, kNumTactics);
    return tape_.softmax_values(all);
}

std::vector<TacticId> PolicyRun::viable_tactics(const Goal& g) { return info(g).viable; }

std::vector<TacticId> PolicyRun::top_tactics(const Goal& g, int k) {
    std::vector<double> probs = tape_.softmax_values(masked_tactic_logits(g));
    const std::vector<TacticId>& viable = info(g).viable;
    std::vector<int> order(viable.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return probs[a] > probs[b]; });
    std::vector<TacticId> out;
    for (int i = 0; i < k && i < static_cast<int>(order.size()); ++i)
        out.push_back(viable[order[static_cast<std::size_t>(i)]]);
    return out;
}

std::vector<std::pair<int, ad::NodeId>> PolicyRun::run_arg_net(
    ad::NodeId gvec, TacticId t, const std::vector<ad::NodeId>& cands, int steps, Rng* rng,
    const std::vector<int>* forced) {
    const PolicyConfig& cfg = policy_->config();
    int d = cfg.d;

    // Wc·e_c is step-independent; build once per candidate.
    ad::NodeId Wh = tape_.param("arg.score.Wh");
    ad::NodeId Wc = tape_.param("arg.score.Wc");
    ad::NodeId sb = tape_.param("arg.score.b");
    ad::NodeId sv = tape_.param("arg.score.v");
    ad::NodeId sb2 = tape_.param("arg.score.b2");
    std::vector<ad::NodeId> wc_e;
    wc_e.reserve(cands.size());
    for (ad::NodeId c : cands) wc_e.push_back(tape_.matvec(Wc, c, d, d));

    std::vector<int> remaining(cands.size());
    for (std::size_t i = 0; i < cands.size(); ++i) remaining[i] = static_cast<int>(i);

    ad::NodeId h = gvec;
    ad::NodeId x = tape_.row(tape_.param("arg.tacemb"), static_cast<int>(t), kNumTactics, d);
    std::vector<std::pair<int, ad::NodeId>> picks;
    for (int step = 0; step < steps; ++step) {
        h = nn::gru_step(tape_, "arg", x, h, d);
        ad::NodeId wh_h = tape_.matvec(Wh, h, d, d);
        std::vector<ad::NodeId> scores;
        scores.reserve(remaining.size());
        for (int c : remaining) {
            ad::NodeId pre = tape_.add(tape_.add(wh_h, wc_e[static_cast<std::size_t>(c)]), sb);
            scores.push_back(tape_.add(tape_.dot(sv, tape_.tanh_(pre)), sb2));
        }
        ad::NodeId logits = tape_.pack(scores);

        int pos;
        ad::NodeId lp;
        if (forced) {
            auto it = std::find(remaining.begin(), remaining.end(), (*forced)[step]);
            if (it == remaining.end())
                throw std::runtime_error("recorded argument is no longer a candidate");
            pos = static_cast<int>(it - remaining.begin());
            lp = tape_.log_softmax_pick(logits, pos);
        } else {
            std::tie(pos, lp) = tape_.categorical_sample(logits, *rng);
        }
        int chosen = remaining[static_cast<std::size_t>(pos)];
        picks.emplace_back(chosen, lp);
        remaining.erase(remaining.begin() + pos);
        x = cands[static_cast<std::size_t>(chosen)];
    }
    return picks;
}

std::pair<Action, std::vector<ad::NodeId>> PolicyRun::sample_arguments(const Goal& g,
                                                                       TacticId t, Rng& rng) {
    GoalInfo& gi = info(g);
    Action a;
    a.tactic = t;
    std::vector<std::pair<int, ad::NodeId>> picks;
    switch (arg_kind(t)) {
        case ArgKind::None:
            return {a, {}};
        case ArgKind::SingleTerm: {
            if (gi.case_terms.empty())
                throw std::invalid_argument("argument-starved tactic sampled");
            std::vector<ad::NodeId> cands;
            for (const Term& term : gi.case_terms) cands.push_back(term_vec(term));
            picks = run_arg_net(gi.vec, t, cands, 1, &rng, nullptr);
            a.term_arg = gi.case_terms[static_cast<std::size_t>(picks[0].first)];
            break;
        }
        default: {
            if (gi.premise_indices.empty())
                throw std::invalid_argument("argument-starved tactic sampled");
            std::vector<ad::NodeId> cands;
            for (int idx : gi.premise_indices) cands.push_back(premise_vec(idx));
            int steps = arg_kind(t) == ArgKind::SingleTheorem
                            ? 1
                            : std::min<int>(policy_->config().L,
                                            static_cast<int>(cands.size()));
            picks = run_arg_net(gi.vec, t, cands, steps, &rng, nullptr);
            for (auto& [pos, lp] : picks)
                a.theorem_args.push_back(gi.premise_indices[static_cast<std::size_t>(pos)]);
        }
    }
    std::vector<ad::NodeId> lps;
    lps.reserve(picks.size());
    for (auto& [pos, lp] : picks) lps.push_back(lp);
    return {a, lps};
}

std::pair<TacticId, ad::NodeId> PolicyRun::sample_tactic(const Goal& g, Rng& rng) {
    auto [pos, lp] = tape_.categorical_sample(masked_tactic_logits(g), rng);
    return {info(g).viable[static_cast<std::size_t>(pos)], lp};
}

SampledAction PolicyRun::sample(const MdpState& s, Rng& rng) {
    SampledAction out;
    auto [fi, f_lp] = tape_.categorical_sample(fringe_logits(s), rng);
    out.fringe_lp = f_lp;

    const Goal& g = s.fringes[static_cast<std::size_t>(fi)].goals[0];
    auto [t, t_lp] = sample_tactic(g, rng);
    out.tactic_lp = t_lp;

    auto [partial, a_lps] = sample_arguments(g, t, rng);
    out.arg_lps = std::move(a_lps);

    out.action = std::move(partial);
    out.action.fringe_idx = fi;
    out.action.goal_idx = 0;
    out.log_prob = tape_.add(out.fringe_lp, out.tactic_lp);
    for (ad::NodeId lp : out.arg_lps) out.log_prob = tape_.add(out.log_prob, lp);
    return out;
}

ad::NodeId PolicyRun::log_prob_of(const MdpState& s, const Action& a) {
    if (a.goal_idx != 0)
        throw std::runtime_error("the policy only assigns probability to goal index 0");
    if (a.fringe_idx < 0 || a.fringe_idx >= static_cast<int>(s.fringes.size()))
        throw std::runtime_error("recorded fringe index out of range");
    ad::NodeId lp = tape_.log_softmax_pick(fringe_logits(s), a.fringe_idx);

    const Goal& g = s.fringes[static_cast<std::size_t>(a.fringe_idx)].goals[0];
    GoalInfo& gi = info(g);
    auto vit = std::find(gi.viable.begin(), gi.viable.end(), a.tactic);
    if (vit == gi.viable.end())
        throw std::runtime_error("recorded tactic is masked in the current state");
    lp = tape_.add(lp, tape_.log_softmax_pick(masked_tactic_logits(g),
                                              static_cast<int>(vit - gi.viable.begin())));

    std::vector<ad::NodeId> cands;
    std::vector<int> forced;
    switch (arg_kind(a.tactic)) {
        case ArgKind::None:
            return lp;
        case ArgKind::SingleTerm: {
            if (!a.term_arg) throw std::runtime_error("recorded action lacks its term");
            auto it = std::find(gi.case_terms.begin(), gi.case_terms.end(), *a.term_arg);
            if (it == gi.case_terms.end())
                throw std::runtime_error("recorded term is no longer a candidate");
            forced.push_back(static_cast<int>(it - gi.case_terms.begin()));
            for (const Term& term : gi.case_terms) cands.push_back(term_vec(term));
            break;
        }
        default: {
            for (int idx : a.theorem_args) {
                auto it =
                    std::find(gi.premise_indices.begin(), gi.premise_indices.end(), idx);
                if (it == gi.premise_indices.end())
                    throw std::runtime_error("recorded premise is no longer a candidate");
                forced.push_back(static_cast<int>(it - gi.premise_indices.begin()));
            }
            for (int idx : gi.premise_indices) cands.push_back(premise_vec(idx));
        }
    }
    auto picks =
        run_arg_net(gi.vec, a.tactic, cands, static_cast<int>(forced.size()), nullptr, &forced);
    for (auto& [pos, plp] : picks) lp = tape_.add(lp, plp);
    return lp;
}

}  // namespace prover
