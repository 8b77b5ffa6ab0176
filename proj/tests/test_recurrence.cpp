#include <catch2/catch_amalgamated.hpp>

#include "rmc/recurrence.hpp"
#include "support.hpp"

using namespace rmc;
using rmctest::all_words;
using rmctest::Rng;

namespace {

Alphabet unary() { return Alphabet::of_names({"a"}); }
Word an(std::size_t n) { return Word(n, intern("a")); }

// {(a^n, a^m) : m > n} -- the transitive closure of the successor step
Transducer successor_closure() {
    Alphabet tr = unary();
    Nfa base(pair_alphabet(tr));
    State s0 = base.add_state(), s1 = base.add_state();
    base.add_initial(s0);
    base.add_final(s1);
    Symbol a = intern("a");
    base.add_transition(s0, pair_symbol(a, a), s0);
    base.add_transition(s0, pair_symbol(SymbolTable::pad, a), s1);
    base.add_transition(s1, pair_symbol(SymbolTable::pad, a), s1);
    base.finish();
    return normalize_convolutions({tr, base});
}

// {(a^n b, a^m b) : m > n}
Transducer grow_ab() {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Symbol a = intern("a"), b = intern("b");
    Nfa base(pair_alphabet(tr));
    State d0 = base.add_state(), d1 = base.add_state(), f = base.add_state();
    base.add_initial(d0);
    base.add_final(f);
    base.add_transition(d0, pair_symbol(a, a), d0);
    base.add_transition(d0, pair_symbol(b, a), d1);
    base.add_transition(d1, pair_symbol(SymbolTable::pad, a), d1);
    base.add_transition(d1, pair_symbol(SymbolTable::pad, b), f);
    base.finish();
    return normalize_convolutions({tr, base});
}

// {(a^n b, a^m b) : m < n} -- strictly shrinking
Transducer shrink_ab() {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Symbol a = intern("a"), b = intern("b");
    Nfa base(pair_alphabet(tr));
    State d0 = base.add_state(), d1 = base.add_state(), f = base.add_state();
    base.add_initial(d0);
    base.add_final(f);
    base.add_transition(d0, pair_symbol(a, a), d0);
    base.add_transition(d0, pair_symbol(a, b), d1);
    base.add_transition(d1, pair_symbol(a, SymbolTable::pad), d1);
    base.add_transition(d1, pair_symbol(b, SymbolTable::pad), f);
    base.finish();
    return normalize_convolutions({tr, base});
}

// {((aa)^n, (aa)^m) : m > n}
Transducer even_closure() {
    Nfa even(unary());
    State e0 = even.add_state(), e1 = even.add_state();
    even.add_initial(e0);
    even.add_final(e0);
    even.add_transition(e0, intern("a"), e1);
    even.add_transition(e1, intern("a"), e0);
    even.finish();
    return rel_restrict(successor_closure(), even, even);
}

Transducer relation_of_pairs(const Alphabet& tr, const std::vector<std::pair<Word, Word>>& pairs) {
    Nfa base = empty_nfa(pair_alphabet(tr));
    for (const auto& [x, y] : pairs)
        base = unite(base, singleton_nfa(pair_alphabet(tr), convolve(x, y)));
    return normalize_convolutions({tr, base});
}

// {x : exists y with (y,y) in r and (x = y or (x,y) in r)}; exact for
// transitive relations over the sampled words
std::vector<Word> brute_chain_set(const Transducer& r, const std::vector<Word>& words) {
    std::vector<Word> out;
    for (const auto& x : words) {
        bool chain = false;
        for (const auto& y : words) {
            if (!member_pair(r, y, y)) continue;
            if (x == y || member_pair(r, x, y)) {
                chain = true;
                break;
            }
        }
        if (chain) out.push_back(x);
    }
    return out;
}

}  // namespace

TEST_CASE("loop detection") {
    Transducer id = identity_on(universal_nfa(unary()));
    Nfa l = rel_loops(id);
    for (std::size_t n = 0; n <= 5; ++n) CHECK(member(l, an(n)));

    CHECK(is_empty(rel_loops(successor_closure())).empty);

    // full relation on a+
    Alphabet tr = unary();
    Nfa aplus(tr);
    State p0 = aplus.add_state(), p1 = aplus.add_state();
    aplus.add_initial(p0);
    aplus.add_final(p1);
    aplus.add_transition(p0, intern("a"), p1);
    aplus.add_transition(p1, intern("a"), p1);
    aplus.finish();
    Transducer full = rel_restrict(
        Transducer{tr, detail::lift_left(universal_nfa(tr))}, aplus, aplus);
    Nfa lf = rel_loops(full);
    CHECK_FALSE(member(lf, an(0)));
    for (std::size_t n = 1; n <= 5; ++n) CHECK(member(lf, an(n)));
}

TEST_CASE("self-cover pumps") {
    Nfa sc = self_cover(successor_closure());
    for (std::size_t n = 0; n <= 5; ++n) CHECK(member(sc, an(n)));

    CHECK(is_empty(self_cover(empty_relation(unary()))).empty);

    Nfa sce = self_cover(even_closure());
    for (std::size_t n = 0; n <= 6; ++n) CHECK(member(sce, an(n)) == (n % 2 == 0));
}

TEST_CASE("self-cover witnesses expand into genuine chains") {
    Transducer r = successor_closure();
    auto w = chain_witness(r, an(2));
    REQUIRE(w.has_value());
    auto chain = expand_witness(r, *w, 10);
    CHECK(chain.size() == 10);
    CHECK(chain[0] == an(2));

    Transducer re = even_closure();
    auto we = chain_witness(re, an(4));
    REQUIRE(we.has_value());
    expand_witness(re, *we, 10);
}

TEST_CASE("bounded tail pump finds shifted loops") {
    Transducer r = grow_ab();
    CHECK(is_empty(self_cover(r)).empty);
    Nfa btp = bounded_tail_pump(r, 1);
    Symbol b = intern("b");
    for (std::size_t n = 0; n <= 4; ++n) {
        Word w = an(n);
        w.push_back(b);
        CHECK(member(btp, w));
    }
    auto wit = chain_witness(r, word_of_names({"b"}));
    REQUIRE(wit.has_value());
    CHECK(wit->kind == PumpWitness::Kind::BoundedTail);
    auto chain = expand_witness(r, *wit, 10);
    CHECK(chain.size() == 10);
}

TEST_CASE("tail pump bound must reach the loop length") {
    // pump loop is aa; bound 1 finds nothing
    std::vector<std::pair<Word, Word>> pairs;
    for (std::size_t n = 0; n <= 3; ++n) pairs.emplace_back(an(2 * n), an(2 * n + 2));
    Transducer r = even_closure();
    CHECK(is_empty(bounded_tail_pump(r, 1)).empty);
    CHECK_FALSE(is_empty(bounded_tail_pump(r, 2)).empty);
    CHECK(is_empty(bounded_tail_pump(empty_relation(unary()), 2)).empty);
}

TEST_CASE("infinite chains of the successor closure") {
    RecurrenceResult res = infinite_chain(successor_closure());
    CHECK(res.status == BoundStatus::Converged);
    Nfa astar = universal_nfa(unary());
    CHECK(equivalent(res.lower, astar).equal);
    CHECK(equivalent(res.upper, astar).equal);
    CHECK(chain_verdict(res, an(3)) == ChainVerdict::Yes);
}

TEST_CASE("strictly shrinking relation stays unknown under the plain fixpoint") {
    Transducer r = shrink_ab();
    RecurrenceConfig cfg;
    cfg.max_gfp_iterations = 6;
    RecurrenceResult res = infinite_chain(r, cfg);
    CHECK(is_empty(res.lower).empty);
    CHECK(res.status == BoundStatus::Bounded);
    Word deep = an(10);
    deep.push_back(intern("b"));
    CHECK(chain_verdict(res, deep) == ChainVerdict::Unknown);

    // iterate inspection: the k-th bound keeps exactly the words with a long
    // enough descent
    Word shallow = an(2);
    shallow.push_back(intern("b"));
    CHECK_FALSE(member(res.upper, shallow));
}

TEST_CASE("the decreasing shortcut closes shrinking relations exactly") {
    Transducer r = shrink_ab();
    RecurrenceConfig cfg;
    cfg.decreasing_shortcut = true;
    RecurrenceResult res = infinite_chain(r, cfg);
    CHECK(res.status == BoundStatus::Converged);
    CHECK(is_empty(res.upper).empty);
    Word deep = an(10);
    deep.push_back(intern("b"));
    CHECK(chain_verdict(res, deep) == ChainVerdict::No);
}

TEST_CASE("finite cyclic graph: everything chains") {
    Alphabet tr = Alphabet::of_names({"a", "b", "c"});
    Word wa = word_of_names({"a"}), wb = word_of_names({"b"}), wc = word_of_names({"c"});
    // transitive closure of a -> b -> c -> b
    Transducer r = relation_of_pairs(
        tr, {{wa, wb}, {wa, wc}, {wb, wb}, {wb, wc}, {wc, wb}, {wc, wc}});
    RecurrenceResult res = infinite_chain(r);
    CHECK(res.status == BoundStatus::Converged);
    for (const auto& w : {wa, wb, wc}) {
        CHECK(member(res.lower, w));
        CHECK(member(res.upper, w));
        CHECK(chain_verdict(res, w) == ChainVerdict::Yes);
    }
    CHECK(equivalent(res.lower, res.upper).equal);
}

TEST_CASE("bounds coincide with brute force on finite transitive relations") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Rng rng(0x6001);
    std::vector<Word> words = all_words(tr, 2);
    for (int round = 0; round < 10; ++round) {
        // random transitive relation: closure of random pairs
        std::vector<std::pair<Word, Word>> pairs;
        for (int i = 0; i < 4; ++i) {
            Word x = words[rng.below(static_cast<std::uint32_t>(words.size()))];
            Word y = words[rng.below(static_cast<std::uint32_t>(words.size()))];
            pairs.emplace_back(x, y);
        }
        Transducer base = relation_of_pairs(tr, pairs);
        ClosureOutcome closed = transitive_closure_semi(base, 32);
        REQUIRE(closed.status == ClosureStatus::Converged);
        RecurrenceResult res = infinite_chain(closed.relation);
        REQUIRE(res.status == BoundStatus::Converged);
        std::vector<Word> brute = brute_chain_set(closed.relation, all_words(tr, 4));
        for (const auto& w : all_words(tr, 4)) {
            bool expect = std::find(brute.begin(), brute.end(), w) != brute.end();
            CHECK(member(res.lower, w) == expect);
            CHECK(member(res.upper, w) == expect);
        }
    }
}

TEST_CASE("converged upper bounds are pre-image fixpoints") {
    Transducer r = successor_closure();
    RecurrenceResult res = infinite_chain(r);
    REQUIRE(res.status == BoundStatus::Converged);
    CHECK(equivalent(res.upper, pre_image(r, res.upper)).equal);
}

TEST_CASE("lower bounds never escape upper bounds") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Rng rng(0x6002);
    for (int round = 0; round < 6; ++round) {
        std::vector<std::pair<Word, Word>> pairs;
        for (int i = 0; i < 5; ++i)
            pairs.emplace_back(rmctest::random_word(rng, tr, 2), rmctest::random_word(rng, tr, 2));
        Transducer base = relation_of_pairs(tr, pairs);
        ClosureOutcome closed = transitive_closure_semi(base, 32);
        if (closed.status != ClosureStatus::Converged) continue;
        RecurrenceResult res = infinite_chain(closed.relation);
        CHECK(includes(res.upper, res.lower).included);
    }
}

TEST_CASE("recurrent reachability of the successor system") {
    Transducer closure = successor_closure();
    Nfa even(unary());
    State e0 = even.add_state(), e1 = even.add_state();
    even.add_initial(e0);
    even.add_final(e0);
    even.add_transition(e0, intern("a"), e1);
    even.add_transition(e1, intern("a"), e0);
    even.finish();

    RecurrenceResult res = reach_inf(closure, even);
    REQUIRE(res.status == BoundStatus::Converged);
    Nfa astar = universal_nfa(unary());
    CHECK(equivalent(res.lower, astar).equal);
    CHECK(equivalent(res.upper, astar).equal);

    auto wit = reach_inf_witness(closure, even, an(3));
    REQUIRE(wit.has_value());
    auto chain = expand_witness(closure, *wit, 10);
    CHECK(chain[0] == an(3));
}

TEST_CASE("recurrent reachability of finite or empty targets is empty") {
    Transducer closure = successor_closure();
    RecurrenceResult res = reach_inf(closure, singleton_nfa(unary(), an(2)));
    CHECK(is_empty(res.lower).empty);
    CHECK(res.status == BoundStatus::Converged);
    CHECK(is_empty(res.upper).empty);

    RecurrenceResult res2 = reach_inf(closure, empty_nfa(unary()));
    CHECK(is_empty(res2.upper).empty);
}

TEST_CASE("recurrence is monotone in the target on samples") {
    Transducer closure = successor_closure();
    Nfa even(unary());
    State e0 = even.add_state(), e1 = even.add_state();
    even.add_initial(e0);
    even.add_final(e0);
    even.add_transition(e0, intern("a"), e1);
    even.add_transition(e1, intern("a"), e0);
    even.finish();
    Nfa all = universal_nfa(unary());

    RecurrenceResult small = reach_inf(closure, even);
    RecurrenceResult big = reach_inf(closure, all);
    CHECK(includes(big.lower, small.lower).included);
}

TEST_CASE("witness expansion validates loops and rejects nonsense") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Word wa = word_of_names({"a"});
    Transducer r = relation_of_pairs(tr, {{wa, wa}});
    PumpWitness loop;
    loop.kind = PumpWitness::Kind::Loop;
    loop.u = wa;
    auto chain = expand_witness(r, loop, 5);
    CHECK(chain == std::vector<Word>(5, wa));

    PumpWitness bogus;
    bogus.kind = PumpWitness::Kind::SelfCover;
    bogus.u = wa;
    bogus.v = word_of_names({"b"});
    CHECK_THROWS_AS(expand_witness(r, bogus, 5), SoundnessError);
}
