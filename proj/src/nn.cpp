#include "prover/nn.hpp"

#include <cmath>

namespace prover::nn {

namespace {

void init_weight(ad::ParamStore& ps, const std::string& name, int rows, int cols, Rng& rng) {
    ps.create_normal(name, static_cast<std::size_t>(rows) * cols, rng,
                     1.0 / std::sqrt(static_cast<double>(cols)));
}

}  // namespace

void init_gru(ad::ParamStore& ps, const std::string& prefix, int d, Rng& rng) {
    for (const char* g : {"z", "r", "n"}) {
        init_weight(ps, prefix + ".W" + g, d, d, rng);
        init_weight(ps, prefix + ".U" + g, d, d, rng);
        ps.create(prefix + ".b" + g, static_cast<std::size_t>(d));
    }
}

ad::NodeId gru_step(ad::Tape& t, const std::string& prefix, ad::NodeId x, ad::NodeId h, int d) {
    auto gate = [&](const char* g) {
        return t.add(t.add(t.matvec(t.param(prefix + ".W" + g), x, d, d),
                           t.matvec(t.param(prefix + ".U" + g), h, d, d)),
                     t.param(prefix + ".b" + g));
    };
    ad::NodeId z = t.sigmoid(gate("z"));
    ad::NodeId r = t.sigmoid(gate("r"));
    ad::NodeId n = t.tanh_(t.add(t.add(t.matvec(t.param(prefix + ".Wn"), x, d, d),
                                       t.mul(r, t.matvec(t.param(prefix + ".Un"), h, d, d))),
                                 t.param(prefix + ".bn")));
    return t.add(t.mul(t.one_minus(z), n), t.mul(z, h));
}

void init_linear(ad::ParamStore& ps, const std::string& prefix, int in, int out, Rng& rng) {
    init_weight(ps, prefix + ".W", out, in, rng);
    ps.create(prefix + ".b", static_cast<std::size_t>(out));
}

ad::NodeId linear(ad::Tape& t, const std::string& prefix, ad::NodeId x, int in, int out) {
    return t.add(t.matvec(t.param(prefix + ".W"), x, out, in), t.param(prefix + ".b"));
}

void init_head(ad::ParamStore& ps, const std::string& prefix, int in, int hidden, int out,
               Rng& rng) {
    init_linear(ps, prefix + ".l1", in, hidden, rng);
    init_linear(ps, prefix + ".l2", hidden, out, rng);
}

ad::NodeId head(ad::Tape& t, const std::string& prefix, ad::NodeId x, int in, int hidden,
                int out) {
    return linear(t, prefix + ".l2", t.tanh_(linear(t, prefix + ".l1", x, in, hidden)), hidden,
                  out);
}

}  // namespace prover::nn
