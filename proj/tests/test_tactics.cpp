#include <algorithm>

#include "doctest.h"
#include "prover/dpll.hpp"
#include "prover/oracle.hpp"
#include "prover/parse.hpp"
#include "prover/rewrite.hpp"
#include "prover/rng.hpp"
#include "prover/tactic.hpp"
#include "test_util.hpp"

using namespace prover;

namespace {

Goal goal(const char* concl) { return Goal(parse_term(concl)); }

Goal goal(std::vector<const char*> assums, const char* concl) {
    std::vector<Term> as;
    for (const char* a : assums) as.push_back(parse_term(a));
    return Goal(std::move(as), parse_term(concl));
}

Theorem thm(const char* name, const char* statement) {
    return Theorem{name, parse_term(statement), "t", 0};
}

TacticOutcome apply(const Goal& g, TacticId t, std::vector<Theorem> thms = {},
                    std::vector<Term> terms = {}, long fuel = 1000) {
    return apply_tactic(g, t, terms, thms, fuel);
}

bool has_goal(const TacticOutcome& o, const Goal& g) {
    return std::any_of(o.subgoals.begin(), o.subgoals.end(),
                       [&](const Goal& u) { return u == g; });
}

}  // namespace

TEST_CASE("strip_tac") {
    // The flagship shape: strip an implication whose antecedent is a
    // conjunction, then split the conjunctive conclusion.
    auto o = apply(goal("p /\\ q ==> p /\\ q"), TacticId::StripTac);
    REQUIRE(o.is_subgoals());
    REQUIRE(o.subgoals.size() == 2);
    CHECK(o.subgoals[0] == goal({"p", "q"}, "p"));
    CHECK(o.subgoals[1] == goal({"p", "q"}, "q"));

    // conclusion already assumed -> closed
    CHECK(apply(goal({"p"}, "p"), TacticId::StripTac).proved());
    CHECK(apply(goal("T"), TacticId::StripTac).proved());
    // stripping an antecedent that equals the remaining conclusion -> closed
    CHECK(apply(goal("p ==> p"), TacticId::StripTac).proved());
    CHECK(apply(goal("q ==> p /\\ q ==> p"), TacticId::StripTac).proved());

    // atomic open goal: nothing to do
    CHECK(apply(goal("p"), TacticId::StripTac).kind == TacticOutcome::Kind::NoChange);
    CHECK(apply(goal("p \\/ q"), TacticId::StripTac).kind == TacticOutcome::Kind::NoChange);

    // chain of antecedents accumulates assumptions
    auto o2 = apply(goal("p ==> q ==> r"), TacticId::StripTac);
    REQUIRE(o2.is_subgoals());
    REQUIRE(o2.subgoals.size() == 1);
    CHECK(o2.subgoals[0] == goal({"p", "q"}, "r"));

    // conjunction splitting recurses into freshly created subgoals
    auto o3 = apply(goal("(p ==> q) /\\ (r ==> s)"), TacticId::StripTac);
    REQUIRE(o3.subgoals.size() == 2);
    CHECK(has_goal(o3, goal({"p"}, "q")));
    CHECK(has_goal(o3, goal({"r"}, "s")));

    // duplicate subgoals collapse
    auto o4 = apply(goal("(p ==> q) /\\ (p ==> q)"), TacticId::StripTac);
    CHECK(o4.subgoals.size() == 1);
}

TEST_CASE("eq_tac") {
    auto o = apply(goal("p /\\ q <=> q /\\ p"), TacticId::EqTac);
    REQUIRE(o.subgoals.size() == 2);
    CHECK(o.subgoals[0] == goal("p /\\ q ==> q /\\ p"));
    CHECK(o.subgoals[1] == goal("q /\\ p ==> p /\\ q"));

    // assumptions carried through
    auto o2 = apply(goal({"r"}, "p <=> q"), TacticId::EqTac);
    CHECK(o2.subgoals[0] == goal({"r"}, "p ==> q"));

    // both directions identical -> single subgoal
    CHECK(apply(goal("p <=> p"), TacticId::EqTac).subgoals.size() == 1);

    CHECK(apply(goal("p ==> q"), TacticId::EqTac).kind == TacticOutcome::Kind::Failed);
}

TEST_CASE("case_on") {
    auto o = apply(goal("p ==> q ==> p"), TacticId::CaseOn, {}, {Term::var("p")});
    REQUIRE(o.subgoals.size() == 2);
    CHECK(o.subgoals[0] == goal("T ==> q ==> T"));
    CHECK(o.subgoals[1] == goal("F ==> q ==> F"));

    // substitution reaches assumptions too
    auto o2 = apply(goal({"p \\/ r"}, "p"), TacticId::CaseOn, {}, {Term::var("p")});
    CHECK(has_goal(o2, goal({"T \\/ r"}, "T")));
    CHECK(has_goal(o2, goal({"F \\/ r"}, "F")));

    // variable absent from the goal: both cases coincide
    CHECK(apply(goal("p"), TacticId::CaseOn, {}, {Term::var("z")}).subgoals.size() == 1);
}

TEST_CASE("simp") {
    // implication-context rewriting closes this without case splits
    CHECK(apply(goal("p ==> q ==> p"), TacticId::Simp).proved());
    CHECK(apply(goal("T ==> q ==> T"), TacticId::Simp).proved());
    CHECK(apply(goal("p /\\ T"), TacticId::Simp).subgoals[0] == goal("p"));
    CHECK(apply(goal("p \\/ ~p"), TacticId::Simp).kind == TacticOutcome::Kind::NoChange);

    // assumptions rewrite the conclusion...
    CHECK(apply(goal({"p", "q"}, "p /\\ q"), TacticId::Simp).proved());
    CHECK(apply(goal({"~p"}, "p \\/ q"), TacticId::Simp).subgoals[0] == goal({"~p"}, "q"));
    // ...but are not themselves rewritten
    auto o = apply(goal({"p /\\ T"}, "q \\/ F"), TacticId::Simp);
    CHECK(o.subgoals[0] == goal({"p /\\ T"}, "q"));

    // theorem rewrites: De Morgan as an Iff, oriented left to right
    Theorem dm = thm("dm", "~(a /\\ b) <=> ~a \\/ ~b");
    auto o2 = apply(goal("~(p /\\ q) ==> r"), TacticId::Simp, {dm});
    REQUIRE(o2.is_subgoals());
    CHECK(o2.subgoals[0] == goal("~p \\/ ~q ==> r"));

    // non-Iff theorems are inert for the simp family
    auto o3 = apply(goal("p /\\ T"), TacticId::Simp, {thm("x", "a ==> a")});
    CHECK(o3.subgoals[0] == goal("p"));

    // a swap rule loops; fuel must run out rather than hang
    Theorem swap = thm("swap", "a /\\ b <=> b /\\ a");
    CHECK(apply(goal("p /\\ q"), TacticId::Simp, {swap}, {}, 50).kind ==
          TacticOutcome::Kind::FuelExhausted);
}

TEST_CASE("rw ignores assumptions, fs rewrites them") {
    Goal g = goal({"p"}, "p /\\ q");
    // simp can use the assumption p to reduce p/\q to q
    CHECK(apply(g, TacticId::Simp).subgoals[0] == goal({"p"}, "q"));
    // rw cannot
    CHECK(apply(g, TacticId::Rw).kind == TacticOutcome::Kind::NoChange);
    // rw still rewrites the conclusion itself
    CHECK(apply(goal({"p"}, "q /\\ T"), TacticId::Rw).subgoals[0] == goal({"p"}, "q"));

    // fs normalizes assumptions: T dropped, F proves outright
    auto o = apply(goal({"p /\\ T", "q \\/ T"}, "r"), TacticId::Fs);
    REQUIRE(o.is_subgoals());
    CHECK(o.subgoals[0] == goal({"p"}, "r"));
    CHECK(apply(goal({"p /\\ F"}, "r"), TacticId::Fs).proved());
    // and then uses them on the conclusion
    CHECK(apply(goal({"p /\\ T"}, "p"), TacticId::Fs).proved());
}

TEST_CASE("metis") {
    CHECK(apply(goal("p ==> q ==> p"), TacticId::Metis).proved());
    CHECK(apply(goal("((p ==> q) ==> p) ==> p"), TacticId::Metis).proved());
    CHECK(apply(goal({"p \\/ q", "~p"}, "q"), TacticId::Metis).proved());
    CHECK(apply(goal("p \\/ q"), TacticId::Metis).kind == TacticOutcome::Kind::Failed);

    // theorem arguments enter as extra assumptions
    Goal g = goal("t0_a");
    CHECK(apply(g, TacticId::Metis).kind == TacticOutcome::Kind::Failed);
    CHECK(apply(g, TacticId::Metis, {thm("ax", "t0_b /\\ t0_a")}).proved());

    // tiny fuel cannot finish a many-variable goal
    Term big = parse_term("a1 /\\ a2 \\/ a3 /\\ a4 \\/ a5 /\\ a6 ==> a7 /\\ a8");
    CHECK(apply(Goal(big), TacticId::Metis, {}, {}, 3).kind ==
          TacticOutcome::Kind::FuelExhausted);
}

TEST_CASE("drule") {
    // modus-ponens-style forward chaining with pattern variables
    Theorem weaken = thm("weaken", "a /\\ b ==> a");
    auto o = apply(goal({"p /\\ q"}, "r"), TacticId::Drule, {weaken});
    REQUIRE(o.is_subgoals());
    CHECK(o.subgoals[0] == goal({"p /\\ q", "p"}, "r"));

    // first matching assumption wins (assumptions are in canonical order)
    Goal g2 = goal({"p /\\ q", "q /\\ r"}, "s");
    auto o2 = apply(g2, TacticId::Drule, {weaken});
    REQUIRE(o2.is_subgoals());
    CHECK(o2.subgoals[0].assumptions().size() == 3);

    CHECK(apply(goal({"p \\/ q"}, "r"), TacticId::Drule, {weaken}).kind ==
          TacticOutcome::Kind::Failed);
    CHECK(apply(goal({"p"}, "r"), TacticId::Drule, {thm("ax", "a /\\ b")}).kind ==
          TacticOutcome::Kind::Failed);
    // theorem a ==> a \/ b: b is not determined by matching the antecedent
    CHECK(apply(goal({"p"}, "r"), TacticId::Drule, {thm("or", "a ==> a \\/ b")}).kind ==
          TacticOutcome::Kind::Failed);
    // deriving an existing assumption changes nothing
    CHECK(apply(goal({"p /\\ q", "p"}, "r"), TacticId::Drule, {weaken}).kind ==
          TacticOutcome::Kind::NoChange);
}

TEST_CASE("irule") {
    // backward chaining: reduce the conclusion to the theorem's antecedent
    Theorem intro = thm("intro", "a ==> a \\/ b");
    auto o = apply(goal("p \\/ q"), TacticId::Irule, {intro});
    REQUIRE(o.is_subgoals());
    CHECK(o.subgoals[0] == goal("p"));

    CHECK(apply(goal("p /\\ q"), TacticId::Irule, {intro}).kind ==
          TacticOutcome::Kind::Failed);
    // antecedent variables must all appear in the conclusion pattern
    CHECK(apply(goal("p"), TacticId::Irule, {thm("bad", "a /\\ b ==> a")}).kind ==
          TacticOutcome::Kind::Failed);

    // implication form is reached by normalization: (a ==> b) /\ T
    Theorem wrapped = thm("w", "(a ==> a \\/ b) /\\ T");
    auto o2 = apply(goal("p \\/ q"), TacticId::Irule, {wrapped});
    REQUIRE(o2.is_subgoals());
    CHECK(o2.subgoals[0] == goal("p"));
}

TEST_CASE("argument kinds are enforced") {
    CHECK_THROWS_AS(apply(goal("p"), TacticId::StripTac, {thm("x", "a ==> a")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply(goal("p"), TacticId::CaseOn), std::invalid_argument);
    CHECK_THROWS_AS(apply(goal("p"), TacticId::Drule), std::invalid_argument);
    CHECK_THROWS_AS(apply(goal("p"), TacticId::Drule,
                          {thm("a", "a ==> a"), thm("b", "b ==> b")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_tactic(goal("p"), TacticId::Simp, {}, {}, 0), std::invalid_argument);
}

TEST_CASE("tactic names round-trip") {
    for (int i = 0; i < kNumTactics; ++i) {
        TacticId t = static_cast<TacticId>(i);
        auto back = tactic_from_name(tactic_name(t));
        REQUIRE(back.has_value());
        CHECK(*back == t);
    }
    CHECK(!tactic_from_name("induct_on").has_value());
}

TEST_CASE("candidate arguments") {
    std::vector<Theorem> lib = {
        {"t0_thm0", parse_term("t0_a ==> t0_a"), "t0", 0},
        {"t1_thm1", parse_term("t1_a ==> t1_a"), "t1", 1},
        {"t0_thm2", parse_term("t0_b \\/ ~t0_b"), "t0", 2},
        {"t0_thm3", parse_term("t0_c ==> t0_c"), "t0", 3},
    };

    // CaseOn: free variables in first-occurrence order
    Candidates c = candidate_arguments(goal("p ==> q ==> p"), TacticId::CaseOn, lib, 2);
    REQUIRE(c.kind == ArgKind::SingleTerm);
    REQUIRE(c.terms.size() == 2);
    CHECK(c.terms[0] == Term::var("p"));
    CHECK(c.terms[1] == Term::var("q"));

    // theorem tactics: earlier-in-library and same-theory only
    Goal g = goal("t0_x ==> t0_x");
    c = candidate_arguments(g, TacticId::Simp, lib, 3);
    REQUIRE(c.kind == ArgKind::TheoremList);
    CHECK(c.theorem_indices == std::vector<int>{0, 2});

    // nothing precedes the first theorem
    CHECK(candidate_arguments(g, TacticId::Metis, lib, 0).theorem_indices.empty());

    // goals mentioning several theories see both
    Goal g2 = goal("t0_x /\\ t1_y");
    c = candidate_arguments(g2, TacticId::Drule, lib, 4);
    CHECK(c.theorem_indices == std::vector<int>{0, 1, 2, 3});

    // assumptions count as mentions
    Goal g3 = goal({"t1_z"}, "p");
    c = candidate_arguments(g3, TacticId::Rw, lib, 4);
    CHECK(c.theorem_indices == std::vector<int>{1});
}

TEST_CASE("dpll agrees with the truth-table oracle") {
    Rng rng(4242);
    std::vector<std::string> vars = {"p", "q", "r", "s", "u", "v", "w"};
    int proved = 0;
    for (int i = 0; i < 600; ++i) {
        Term t = testutil::random_term(rng, vars, 5);
        if (i % 3 == 0) t = Term::implies(t, t);  // sprinkle in guaranteed tautologies
        DpllResult r = dpll_tautology(t, 1000000);
        REQUIRE(r != DpllResult::FuelOut);
        bool valid = is_tautology(t);
        CHECK((r == DpllResult::Proved) == valid);
        proved += valid;
    }
    CHECK(proved > 150);
}

TEST_CASE("dpll fuel is deterministic and monotone") {
    Term t = parse_term("(p ==> q) ==> (q ==> r) ==> p ==> r");
    // find the exact budget where the search completes
    long needed = -1;
    for (long f = 1; f < 1000; ++f)
        if (dpll_tautology(t, f) != DpllResult::FuelOut) {
            needed = f;
            break;
        }
    REQUIRE(needed > 1);
    CHECK(dpll_tautology(t, needed - 1) == DpllResult::FuelOut);
    for (long f : {needed, needed + 1, needed * 10})
        CHECK(dpll_tautology(t, f) == DpllResult::Proved);
}

TEST_CASE("rewriter primitives") {
    SUBCASE("pattern matching binds consistently") {
        auto b = match_pattern(parse_term("a /\\ a"), parse_term("(p \\/ q) /\\ (p \\/ q)"));
        REQUIRE(b.has_value());
        CHECK(b->size() == 1);
        CHECK(!match_pattern(parse_term("a /\\ a"), parse_term("p /\\ q")).has_value());
        CHECK(!match_pattern(parse_term("a /\\ b"), parse_term("p \\/ q")).has_value());

        auto b2 = match_pattern(parse_term("a ==> b"), parse_term("p /\\ q ==> r"));
        REQUIRE(b2.has_value());
        CHECK(apply_bindings(parse_term("b ==> a"), *b2) == parse_term("r ==> p /\\ q"));
    }

    SUBCASE("normalization reaches fixpoints through nested structure") {
        Rewriter rw({}, 1000, true);
        CHECK(*rw.normalize(parse_term("~~(p /\\ T)")) == parse_term("p"));
        CHECK(*rw.normalize(parse_term("(F \\/ p) /\\ (q \\/ T)")) == parse_term("p"));
        CHECK(*rw.normalize(parse_term("p <=> p")) == Term::truth());
        CHECK(*rw.normalize(parse_term("~(T ==> F)")) == Term::truth());
    }

    SUBCASE("facts rewrite matching subterms") {
        Rewriter rw({}, 1000, true);
        std::vector<Fact> facts;
        collect_facts(parse_term("p /\\ ~q"), facts);
        // p -> T, ~q -> T, q -> F, and the whole conjunction -> T
        CHECK(*rw.normalize(parse_term("q \\/ p"), facts) == Term::truth());
        CHECK(*rw.normalize(parse_term("q"), facts) == Term::falsity());
        CHECK(*rw.normalize(parse_term("p /\\ ~q ==> r"), facts) == parse_term("r"));
    }

    SUBCASE("fuel counts every applied rewrite") {
        // p /\ T -> p  is exactly one rewrite
        Rewriter one({}, 1, true);
        CHECK(one.normalize(parse_term("p /\\ T")).has_value());
        CHECK(one.fuel_left() == 0);
        Rewriter zero({}, 1, true);
        // two rewrites needed: inner then outer
        CHECK(!zero.normalize(parse_term("(p /\\ T) /\\ T")).has_value());
    }
}

TEST_CASE("tactic soundness on random goals") {
    // For every outcome Subgoals(S): validity of all of S must imply validity
    // of the input — and Subgoals({}) must certify validity outright. Theorem
    // arguments are drawn valid, as the contract requires.
    Rng rng(20260815);
    std::vector<std::string> vars = {"p", "q", "r"};
    std::vector<Theorem> valid_thms = {
        thm("w1", "a /\\ b ==> a"),
        thm("w2", "a ==> a \\/ b"),
        thm("dm", "~(a /\\ b) <=> ~a \\/ ~b"),
        thm("dj", "~(a \\/ b) <=> ~a /\\ ~b"),
        thm("im", "a ==> b ==> a"),
    };

    int subgoal_outcomes = 0;
    for (int i = 0; i < 800; ++i) {
        Term concl = testutil::random_term(rng, vars, 4);
        std::vector<Term> assums;
        for (uint64_t k = rng.below(3); k > 0; --k)
            assums.push_back(testutil::random_term(rng, vars, 2));
        Goal g(assums, concl);

        TacticId t = static_cast<TacticId>(rng.below(kNumTactics));
        std::vector<Term> term_args;
        std::vector<Theorem> thm_args;
        switch (arg_kind(t)) {
            case ArgKind::None: break;
            case ArgKind::SingleTerm: {
                auto fv = free_vars(g.as_term());
                if (fv.empty()) continue;
                term_args.push_back(Term::var(fv[rng.below(fv.size())]));
                break;
            }
            case ArgKind::SingleTheorem:
                thm_args.push_back(valid_thms[rng.below(valid_thms.size())]);
                break;
            case ArgKind::TheoremList:
                for (uint64_t k = rng.below(3); k > 0; --k)
                    thm_args.push_back(valid_thms[rng.below(valid_thms.size())]);
                break;
        }

        TacticOutcome o = apply_tactic(g, t, term_args, thm_args, 1000);
        if (!o.is_subgoals()) continue;
        ++subgoal_outcomes;

        bool all_sub_valid = std::all_of(o.subgoals.begin(), o.subgoals.end(),
                                         [](const Goal& s) { return is_valid_goal(s); });
        if (all_sub_valid) {
            INFO("tactic ", tactic_name(t), " on ", g.to_string());
            CHECK(is_valid_goal(g));
        }

        // determinism
        TacticOutcome o2 = apply_tactic(g, t, term_args, thm_args, 1000);
        REQUIRE(o2.kind == o.kind);
        REQUIRE(o2.subgoals.size() == o.subgoals.size());
        for (std::size_t k = 0; k < o.subgoals.size(); ++k)
            REQUIRE(o2.subgoals[k] == o.subgoals[k]);

        // fuel monotonicity
        TacticOutcome o3 = apply_tactic(g, t, term_args, thm_args, 10000);
        REQUIRE(o3.kind == o.kind);
        for (std::size_t k = 0; k < o.subgoals.size(); ++k)
            REQUIRE(o3.subgoals[k] == o.subgoals[k]);
    }
    CHECK(subgoal_outcomes > 200);
}
