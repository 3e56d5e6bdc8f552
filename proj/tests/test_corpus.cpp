#include <cstdio>
#include <fstream>
#include <set>

#include "doctest.h"
#include "prover/corpus.hpp"
#include "prover/oracle.hpp"
#include "prover/parse.hpp"

using namespace prover;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const char* name) : path(std::string("/tmp/") + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("corpus generation") {
    CorpusConfig cfg;
    cfg.seed = 42;
    cfg.n = 60;
    std::vector<Theorem> corpus = generate_corpus(cfg);
    REQUIRE(corpus.size() == 60);

    std::set<std::string> names;
    std::set<std::string> statements;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const Theorem& t = corpus[i];
        CHECK(t.index == static_cast<int>(i));
        CHECK(t.theory == "t" + std::to_string(i % 5));
        CHECK(t.name.rfind(t.theory + "_thm", 0) == 0);
        CHECK(names.insert(t.name).second);
        CHECK(statements.insert(t.statement.to_string()).second);
        CHECK(is_tautology(t.statement));
        // the theorem's own theory appears among its variables
        bool mentions_own = false;
        for (const std::string& v : free_vars(t.statement))
            if (v.rfind(t.theory + "_", 0) == 0) mentions_own = true;
        CHECK(mentions_own);
    }

    // determinism
    std::vector<Theorem> again = generate_corpus(cfg);
    REQUIRE(again.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(again[i].name == corpus[i].name);
        CHECK(again[i].statement == corpus[i].statement);
    }

    // single-record boundary
    CorpusConfig one;
    one.n = 1;
    std::vector<Theorem> solo = generate_corpus(one);
    REQUIRE(solo.size() == 1);
    CHECK(solo[0].index == 0);

    CorpusConfig bad;
    bad.max_vars = 9;
    CHECK_THROWS_AS(generate_corpus(bad), std::invalid_argument);
}

TEST_CASE("corpus split") {
    CorpusConfig cfg;
    cfg.seed = 7;
    cfg.n = 10;
    std::vector<Theorem> corpus = generate_corpus(cfg);

    auto [train, test] = split_corpus(corpus, 0.8, 123);
    CHECK(train.size() == 8);
    CHECK(test.size() == 2);

    // disjoint and exhaustive
    std::set<std::string> all;
    for (const Theorem& t : train) all.insert(t.name);
    for (const Theorem& t : test) CHECK(all.insert(t.name).second);
    CHECK(all.size() == 10);

    // deterministic
    auto [train2, test2] = split_corpus(corpus, 0.8, 123);
    for (std::size_t i = 0; i < train.size(); ++i) CHECK(train2[i].name == train[i].name);

    // a different seed usually reorders
    auto [train3, test3] = split_corpus(corpus, 0.8, 124);
    bool any_diff = false;
    for (std::size_t i = 0; i < train.size(); ++i)
        if (train3[i].name != train[i].name) any_diff = true;
    CHECK(any_diff);

    // the paper-scale arithmetic: 1342 at 0.8 -> 1074/268
    std::vector<Theorem> big;
    Term stub = parse_term("p \\/ ~p");
    for (int i = 0; i < 1342; ++i) big.push_back(Theorem{"x" + std::to_string(i), stub, "t0", i});
    auto [btrain, btest] = split_corpus(big, 0.8, 1);
    CHECK(btrain.size() == 1074);
    CHECK(btest.size() == 268);

    CHECK_THROWS_AS(split_corpus(corpus, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(split_corpus(corpus, 1.0, 1), std::invalid_argument);
}

TEST_CASE("corpus save/load round-trip") {
    CorpusConfig cfg;
    cfg.seed = 99;
    cfg.n = 25;
    std::vector<Theorem> corpus = generate_corpus(cfg);

    TempFile f("corpus_roundtrip.jsonl");
    save_corpus(corpus, f.path);
    std::vector<Theorem> back = load_corpus(f.path);
    REQUIRE(back.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CHECK(back[i].name == corpus[i].name);
        CHECK(back[i].statement == corpus[i].statement);
        CHECK(back[i].theory == corpus[i].theory);
        CHECK(back[i].index == corpus[i].index);
    }
}

TEST_CASE("corpus load rejects bad files") {
    CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), std::runtime_error);

    auto write = [](const std::string& path, const std::string& content) {
        std::ofstream out(path);
        out << content;
    };
    auto expect_error = [&](const std::string& content, const char* needle) {
        TempFile f("corpus_bad.jsonl");
        write(f.path, content);
        try {
            load_corpus(f.path);
            CHECK(false);
        } catch (const std::runtime_error& e) {
            std::string msg = e.what();
            CAPTURE(msg);
            CHECK(msg.find(needle) != std::string::npos);
        }
    };

    std::string good = R"({"name":"a","statement":"p \\/ ~p","theory":"t0","index":0})";
    // malformed json on line 2
    expect_error(good + "\nnot json\n", ":2");
    // missing field
    expect_error(R"({"name":"a","statement":"p \\/ ~p","theory":"t0"})", "required field");
    // unparseable statement
    expect_error(R"({"name":"a","statement":"p ==>","theory":"t0","index":0})",
                 "bad statement");
    // non-tautology named in the message
    expect_error(R"({"name":"nope","statement":"p \\/ q","theory":"t0","index":0})", "nope");
    // duplicate names
    expect_error(good + "\n" +
                     R"({"name":"a","statement":"q \\/ ~q","theory":"t0","index":1})",
                 "duplicate");
    // indices not a permutation
    expect_error(R"({"name":"a","statement":"p \\/ ~p","theory":"t0","index":5})",
                 "permutation");
}
