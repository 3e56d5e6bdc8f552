#pragma once

#include <string>

#include "prover/rng.hpp"
#include "prover/tape.hpp"

namespace prover::nn {

// Parameter-name conventions: a GRU under prefix "p" owns p.Wz p.Uz p.bz
// p.Wr p.Ur p.br p.Wn p.Un p.bn; a linear layer owns p.W p.b. Weights are
// normal(0, 1/sqrt(fan_in)), biases zero.

void init_gru(ad::ParamStore& ps, const std::string& prefix, int d, Rng& rng);

// One update: z=σ(Wz x+Uz h+bz), r=σ(Wr x+Ur h+br),
// n=tanh(Wn x+r∘(Un h)+bn), h'=(1−z)∘n+z∘h. x and h both live in R^d.
ad::NodeId gru_step(ad::Tape& t, const std::string& prefix, ad::NodeId x, ad::NodeId h, int d);

void init_linear(ad::ParamStore& ps, const std::string& prefix, int in, int out, Rng& rng);
ad::NodeId linear(ad::Tape& t, const std::string& prefix, ad::NodeId x, int in, int out);

// Two-layer head W2·tanh(W1 x + b1) + b2 under prefixes "p.l1"/"p.l2".
void init_head(ad::ParamStore& ps, const std::string& prefix, int in, int hidden, int out,
               Rng& rng);
ad::NodeId head(ad::Tape& t, const std::string& prefix, ad::NodeId x, int in, int hidden,
                int out);

}  // namespace prover::nn
