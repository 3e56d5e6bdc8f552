#include "prover/encoder.hpp"

#include <algorithm>
#include <stdexcept>

#include "prover/optim.hpp"

namespace prover {

void EncoderModel::init_params(ad::ParamStore& ps, Rng& rng) const {
    ps.create_normal("emb.table", static_cast<std::size_t>(vocab.size()) * d, rng,
                     1.0 / std::sqrt(static_cast<double>(d)));
    nn::init_gru(ps, "enc", d, rng);
}

ad::NodeId EncoderModel::embed(ad::Tape& t, int token_id) const {
    return t.row(t.param("emb.table"), token_id, vocab.size(), d);
}

ad::NodeId EncoderModel::encode_ids(ad::Tape& t, const std::vector<int>& ids) const {
    if (ids.empty()) throw std::invalid_argument("encode of an empty token sequence");
    std::vector<double> zeros(static_cast<std::size_t>(d), 0.0);
    ad::NodeId h = t.input(zeros.data(), zeros.size());
    for (int id : ids) h = nn::gru_step(t, "enc", embed(t, id), h, d);
    return h;
}

ad::NodeId EncoderModel::encode_term(ad::Tape& t, const Term& term) const {
    return encode_ids(t, vocab.encode_term(term));
}

ad::NodeId EncoderModel::encode_goal(ad::Tape& t, const Goal& g) const {
    return encode_ids(t, vocab.encode_goal(g));
}

namespace {

// Teacher-forced decode of one term; returns the summed cross-entropy node
// and counts argmax hits.
ad::NodeId decode_loss(const EncoderModel& enc, ad::Tape& t, const std::vector<int>& ids,
                       int* hits) {
    int V = enc.vocab.size();
    ad::NodeId h = enc.encode_ids(t, ids);
    ad::NodeId x = enc.embed(t, Vocab::kPad);  // start-of-sequence
    ad::NodeId loss = t.input_scalar(0.0);
    for (int target : ids) {
        h = nn::gru_step(t, "dec", x, h, enc.d);
        ad::NodeId logits = nn::linear(t, "dec.out", h, enc.d, V);
        loss = t.add(loss, t.scale(t.log_softmax_pick(logits, target), -1.0));
        if (hits) {
            const double* v = t.value(logits);
            int best = static_cast<int>(std::max_element(v, v + V) - v);
            if (best == target) ++*hits;
        }
        x = enc.embed(t, target);
    }
    return loss;
}

}  // namespace

PretrainStats pretrain_reconstruction(const EncoderModel& enc, ad::ParamStore& ps,
                                      const std::vector<Term>& corpus, int epochs, double lr,
                                      Rng& rng) {
    if (corpus.empty()) throw std::invalid_argument("pretraining needs a nonempty corpus");
    if (epochs > 0 && !ps.has("dec.Wz")) {
        nn::init_gru(ps, "dec", enc.d, rng);
        nn::init_linear(ps, "dec.out", enc.d, enc.vocab.size(), rng);
    }

    std::vector<std::vector<int>> sequences;
    sequences.reserve(corpus.size());
    for (const Term& term : corpus) sequences.push_back(enc.vocab.encode_term(term));

    PretrainStats stats;
    ad::RmsProp opt({lr, 0.99, 1e-8});
    ad::GradStore grads;
    for (int e = 0; e < epochs; ++e) {
        double epoch_loss = 0.0;
        grads.clear();
        for (const auto& ids : sequences) {
            ad::Tape t(ps);
            ad::NodeId loss = decode_loss(enc, t, ids, nullptr);
            epoch_loss += t.scalar(loss);
            t.backward(loss, 1.0, grads);
        }
        opt.step(ps, grads);
        stats.epoch_losses.push_back(epoch_loss);
    }

    // Accuracy under the final parameters (decoder may not exist when
    // epochs == 0; report 0 in that case).
    int hits = 0, total = 0;
    if (ps.has("dec.Wz")) {
        for (const auto& ids : sequences) {
            ad::Tape t(ps);
            decode_loss(enc, t, ids, &hits);
            total += static_cast<int>(ids.size());
        }
    }
    stats.token_accuracy = total ? static_cast<double>(hits) / total : 0.0;
    return stats;
}

}  // namespace prover
