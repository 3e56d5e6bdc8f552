#include <cmath>

#include "doctest.h"
#include "prover/encoder.hpp"
#include "prover/optim.hpp"
#include "prover/parse.hpp"
#include "prover/rng.hpp"
#include "test_util.hpp"

using namespace prover;

namespace {

EncoderModel small_encoder(int d = 6) {
    return EncoderModel{Vocab({"p", "q", "r", "t0_a", "t0_b"}), d};
}

}  // namespace

TEST_CASE("vocab layout") {
    Vocab v({"q", "p", "p"});  // dedup + sort
    CHECK(v.id("<pad>") == Vocab::kPad);
    CHECK(v.id("<unk>") == Vocab::kUnk);
    CHECK(v.token(Vocab::kPad) == "<pad>");
    CHECK(v.id("~") == 2);
    CHECK(v.id("/\\") == 3);
    CHECK(v.id("\\/") == 4);
    CHECK(v.id("==>") == 5);
    CHECK(v.id("<=>") == 6);
    CHECK(v.id("T") == 7);
    CHECK(v.id("F") == 8);
    CHECK(v.size() == 11);
    CHECK(v.id("p") == 9);
    CHECK(v.id("q") == 10);
    CHECK(v.id("zebra") == Vocab::kUnk);

    // ids are dense and invertible
    for (int i = 0; i < v.size(); ++i) CHECK(v.id(v.token(i)) == i);

    CHECK_THROWS_AS(Vocab({"T"}), std::invalid_argument);
}

TEST_CASE("vocab from corpus and serialization round-trip") {
    std::vector<Theorem> thms = {
        {"a", parse_term("t0_x ==> t0_x"), "t0", 0},
        {"b", parse_term("t1_y /\\ t0_x"), "t1", 1},
    };
    Vocab v = Vocab::from_corpus(thms);
    CHECK(v.size() == 9 + 2);
    CHECK(v.id("t0_x") == 9);
    CHECK(v.id("t1_y") == 10);

    Vocab back = Vocab::from_tokens(v.tokens());
    CHECK(back == v);
    CHECK_THROWS_AS(Vocab::from_tokens({"<pad>", "bad"}), std::invalid_argument);
}

TEST_CASE("term and goal token encoding") {
    Vocab v({"p", "q"});
    // prefix notation: ==> p /\ q p
    CHECK(v.encode_term(parse_term("p ==> q /\\ p")) ==
          std::vector<int>{5, v.id("p"), 3, v.id("q"), v.id("p")});

    Goal g({parse_term("p"), parse_term("q")}, parse_term("p"));
    CHECK(v.encode_goal(g) == v.encode_term(parse_term("p ==> q ==> p")));

    Goal flipped({parse_term("q"), parse_term("p")}, parse_term("p"));
    CHECK(v.encode_goal(flipped) == v.encode_goal(g));
}

TEST_CASE("zero parameters encode everything to zero") {
    EncoderModel enc = small_encoder();
    ad::ParamStore ps;
    Rng rng(1);
    enc.init_params(ps, rng);
    for (auto& [name, vals] : ps.entries()) std::fill(vals.begin(), vals.end(), 0.0);

    ad::Tape t(ps);
    ad::NodeId h = enc.encode_ids(t, {Vocab::kPad});
    for (int i = 0; i < enc.d; ++i) CHECK(t.value(h)[i] == 0.0);

    ad::NodeId h2 = enc.encode_term(t, parse_term("p /\\ q ==> r"));
    for (int i = 0; i < enc.d; ++i) CHECK(t.value(h2)[i] == 0.0);

    CHECK_THROWS_AS(enc.encode_ids(t, {}), std::invalid_argument);
}

TEST_CASE("encoding is deterministic and shaped") {
    EncoderModel enc = small_encoder();
    ad::ParamStore ps;
    Rng rng(7);
    enc.init_params(ps, rng);

    Term term = parse_term("(p ==> q) <=> ~p \\/ q");
    ad::Tape t1(ps), t2(ps);
    ad::NodeId a = enc.encode_term(t1, term);
    ad::NodeId b = enc.encode_term(t2, term);
    REQUIRE(t1.size(a) == enc.d);
    for (int i = 0; i < enc.d; ++i) {
        CHECK(t1.value(a)[i] == t2.value(b)[i]);
        CHECK(std::isfinite(t1.value(a)[i]));
    }

    // goal encoding equals the chained-implication term encoding
    Goal g({parse_term("p"), parse_term("q")}, parse_term("p"));
    ad::Tape t3(ps), t4(ps);
    ad::NodeId gv = enc.encode_goal(t3, g);
    ad::NodeId tv = enc.encode_term(t4, parse_term("p ==> q ==> p"));
    for (int i = 0; i < enc.d; ++i) CHECK(t3.value(gv)[i] == t4.value(tv)[i]);
}

TEST_CASE("encoder gradients match finite differences") {
    Rng rng(99);
    std::vector<std::string> vars = {"p", "q", "r"};
    int failures = 0;
    for (int draw = 0; draw < 100; ++draw) {
        EncoderModel enc = small_encoder(4);
        ad::ParamStore ps;
        enc.init_params(ps, rng);
        Term term = testutil::random_term(rng, vars, 3);

        auto f = [&] {
            ad::Tape t(ps);
            return t.scalar(t.sum(enc.encode_term(t, term)));
        };
        ad::GradStore grads;
        {
            ad::Tape t(ps);
            t.backward(t.sum(enc.encode_term(t, term)), 1.0, grads);
        }
        ad::FdReport rep = ad::finite_diff_check(ps, f, grads, 4, rng);
        if (!rep.ok()) {
            ++failures;
            CAPTURE(rep.worst_param);
            CAPTURE(rep.max_rel_err);
        }
        CHECK(rep.ok());
    }
    CHECK(failures == 0);
}

TEST_CASE("reconstruction pretraining") {
    EncoderModel enc{Vocab({"p", "q", "r", "s"}), 16};
    ad::ParamStore ps;
    Rng rng(5);
    enc.init_params(ps, rng);

    std::vector<Term> corpus;
    for (const char* s : {"p ==> q", "p /\\ q", "~p \\/ r", "p <=> s", "q /\\ ~r",
                          "s ==> p /\\ q", "~(p ==> r)", "q \\/ s", "p /\\ q ==> p",
                          "r <=> ~s"})
        corpus.push_back(parse_term(s));

    SUBCASE("zero epochs leave parameters untouched") {
        auto before = ps.entries();
        PretrainStats st = pretrain_reconstruction(enc, ps, corpus, 0, 1e-2, rng);
        CHECK(st.epoch_losses.empty());
        CHECK(st.token_accuracy == 0.0);
        CHECK(ps.entries() == before);
    }

    SUBCASE("two hundred epochs reconstruct the corpus") {
        PretrainStats st = pretrain_reconstruction(enc, ps, corpus, 200, 1e-2, rng);
        REQUIRE(st.epoch_losses.size() == 200);
        CHECK(st.token_accuracy >= 0.9);
        // training curve is non-increasing within 5% jitter
        for (std::size_t e = 1; e < st.epoch_losses.size(); ++e)
            CHECK(st.epoch_losses[e] <= st.epoch_losses[e - 1] * 1.05);
        CHECK(st.epoch_losses.back() < st.epoch_losses.front());
    }

    CHECK_THROWS_AS(pretrain_reconstruction(enc, ps, {}, 1, 1e-2, rng),
                    std::invalid_argument);
}
