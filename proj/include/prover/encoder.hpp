#pragma once

#include <vector>

#include "prover/goal.hpp"
#include "prover/nn.hpp"
#include "prover/rng.hpp"
#include "prover/tape.hpp"
#include "prover/term.hpp"
#include "prover/vocab.hpp"

namespace prover {

// Recurrent sequence encoder: token embeddings fed through a GRU; a term's
// vector is the final hidden state over its prefix-notation tokens. Owns the
// parameter names "emb.table" and "enc.*".
struct EncoderModel {
    Vocab vocab;
    int d = 64;

    void init_params(ad::ParamStore& ps, Rng& rng) const;

    ad::NodeId embed(ad::Tape& t, int token_id) const;
    // Final hidden state; throws std::invalid_argument on an empty sequence.
    ad::NodeId encode_ids(ad::Tape& t, const std::vector<int>& ids) const;
    ad::NodeId encode_term(ad::Tape& t, const Term& term) const;
    // Encodes the chained-implication form, so assumption order is irrelevant.
    ad::NodeId encode_goal(ad::Tape& t, const Goal& g) const;
};

struct PretrainStats {
    std::vector<double> epoch_losses;  // summed token cross-entropy per epoch
    double token_accuracy = 0.0;       // teacher-forced argmax accuracy, final params
};

// Autoencoding warm-up: encode each term, then decode it token-by-token with
// a paired GRU ("dec.*", created here on first use), minimizing cross
// entropy. One RMSProp step per epoch over the summed loss. epochs == 0
// leaves parameters untouched (accuracy is still measured).
PretrainStats pretrain_reconstruction(const EncoderModel& enc, ad::ParamStore& ps,
                                      const std::vector<Term>& corpus, int epochs, double lr,
                                      Rng& rng);

}  // namespace prover
