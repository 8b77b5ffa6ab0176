#include <catch2/catch_amalgamated.hpp>

#include "formula_gen.hpp"
#include "rmc/oneweak.hpp"
#include "support.hpp"

using namespace rmc;
using namespace rmc::ltl;
using rmctest::Rng;

namespace {

Alphabet act2() { return Alphabet::of_names({"a", "b"}); }

}  // namespace

TEST_CASE("negation automaton of a guarded until accepts exactly the guard loop") {
    Alphabet A = act2();
    LtlFormula f = parse("(a & true) U (!a & true)", A);
    Owfa aut = neg_det_translate(f);
    Word e, wa = word_of_names({"a"}), wb = word_of_names({"b"});
    CHECK(owfa_lasso_member(aut, e, wa));
    CHECK_FALSE(owfa_lasso_member(aut, e, wb));
    CHECK_FALSE(owfa_lasso_member(aut, e, word_of_names({"a", "b"})));
    CHECK_FALSE(owfa_lasso_member(aut, wb, wa));
}

TEST_CASE("negation automaton of an atom accepts the complement first letter") {
    Alphabet A = act2();
    Owfa aut = neg_det_translate(parse("a", A));
    Rng rng(0x5001);
    for (int i = 0; i < 30; ++i) {
        auto l = rmctest::random_lasso(rng, A, 3, 3);
        Symbol first = l.prefix.empty() ? l.period[0] : l.prefix[0];
        CHECK(owfa_lasso_member(aut, l.prefix, l.period) == (first == intern("b")));
    }
}

TEST_CASE("negation automaton of weak-until-bottom accepts eventually-not-guard") {
    Alphabet A = act2();
    LtlFormula f = parse("(a & true) W (!a & false)", A);  // same meaning as G a
    Owfa aut = neg_det_translate(f);
    LtlFormula expected = parse("F b", A);  // over {a,b}: !a is b
    Rng rng(0x5002);
    for (int i = 0; i < 50; ++i) {
        auto l = rmctest::random_lasso(rng, A, 3, 3);
        CHECK(owfa_lasso_member(aut, l.prefix, l.period) == lasso_sat(l.prefix, l.period, expected));
    }
}

TEST_CASE("negation translation agrees with satisfaction on 200 seeded formulas") {
    Alphabet A = act2();
    Rng rng(0x5003);
    for (int i = 0; i < 200; ++i) {
        LtlFormula f = rmctest::compiled(A, rmctest::random_det_formula(rng, A, 8));
        REQUIRE(is_det(f));
        Owfa aut = neg_det_translate(f);
        for (int j = 0; j < 10; ++j) {
            auto l = rmctest::random_lasso(rng, A, 3, 3);
            bool expect = !lasso_sat(l.prefix, l.period, f);
            bool got = owfa_lasso_member(aut, l.prefix, l.period);
            INFO(print(f) << " on " << word_to_string(l.prefix) << " (" << word_to_string(l.period) << ")^w");
            CHECK(expect == got);
        }
    }
}

TEST_CASE("negation translation stays within the linear size bound") {
    Alphabet A = act2();
    Rng rng(0x5004);
    for (int i = 0; i < 200; ++i) {
        LtlFormula f = rmctest::compiled(A, rmctest::random_det_formula(rng, A, 9));
        Owfa aut = neg_det_translate(f);
        CHECK(aut.num_states <= 3 * formula_size(f.root) + 2);
        CHECK(one_weak_check(aut).one_weak);
        for (const auto& fs : aut.fairness) CHECK(fs.empty());
    }
}

TEST_CASE("recurrence gadget has one fair accepting state") {
    Alphabet A = act2();
    Owfa aut = fg_translate(parse("Gs Fs b", A));
    REQUIRE(aut.num_states == 1);
    CHECK(aut.accepting[0]);
    CHECK(aut.self_loop[0] == LetterSet(A.symbols()));
    REQUIRE(aut.fairness[0].size() == 1);
    CHECK(aut.fairness[0][0] == LetterSet{intern("b")});

    Word wa = word_of_names({"a"});
    CHECK(owfa_lasso_member(aut, wa, word_of_names({"a", "b"})));
    CHECK_FALSE(owfa_lasso_member(aut, wa, wa));
}

TEST_CASE("strict-eventually gadget waits then accepts everything") {
    Alphabet A = act2();
    Owfa aut = fg_translate(parse("Fs a", A));
    Word wb = word_of_names({"b"});
    CHECK_FALSE(owfa_lasso_member(aut, wb, wb));
    CHECK(owfa_lasso_member(aut, wb, word_of_names({"b", "a"})));
    CHECK(owfa_lasso_member(aut, {}, word_of_names({"a"})));
}

TEST_CASE("strict-fragment translation agrees with the tableau on 300 seeded formulas") {
    Alphabet A = act2();
    Rng rng(0x5005);
    for (int i = 0; i < 300; ++i) {
        LtlFormula f = rmctest::compiled(A, rmctest::random_fg_formula(rng, A, 7));
        REQUIRE(is_fg(f));
        Owfa aut = fg_translate(f);
        CHECK(one_weak_check(aut).one_weak);
        Nbwa tab = tableau(f);
        for (int j = 0; j < 20; ++j) {
            auto l = rmctest::random_lasso(rng, A, 3, 3);
            bool expect = lasso_sat(l.prefix, l.period, f);
            bool via_tab = nbwa_lasso_member(tab, l.prefix, l.period);
            bool via_owfa = owfa_lasso_member(aut, l.prefix, l.period);
            INFO(print(f) << " on " << word_to_string(l.prefix) << " (" << word_to_string(l.period) << ")^w");
            CHECK(via_tab == expect);
            CHECK(via_owfa == expect);
        }
    }
}

TEST_CASE("fairness sets are letter sets over the action alphabet") {
    Alphabet A = act2();
    Rng rng(0x5006);
    for (int i = 0; i < 50; ++i) {
        LtlFormula f = rmctest::compiled(A, rmctest::random_fg_formula(rng, A, 7));
        Owfa aut = fg_translate(f);
        for (State s = 0; s < aut.num_states; ++s) {
            if (!aut.accepting[s]) CHECK(aut.fairness[s].empty());
            for (const auto& fs : aut.fairness[s])
                for (Symbol c : fs) CHECK(A.contains(c));
        }
    }
}

TEST_CASE("one-weak view of a 1-weak Büchi automaton preserves lassos") {
    Alphabet A = act2();
    // F a translates to a 1-weak tableau
    Nbwa tab = tableau(parse("F a", A));
    OneWeakResult chk = one_weak_check(tab);
    if (chk.one_weak) {
        Owfa view = owfa_from_nbwa(tab);
        Rng rng(0x5007);
        for (int i = 0; i < 40; ++i) {
            auto l = rmctest::random_lasso(rng, A, 3, 3);
            CHECK(owfa_lasso_member(view, l.prefix, l.period) ==
                  nbwa_lasso_member(tab, l.prefix, l.period));
        }
    }
}
