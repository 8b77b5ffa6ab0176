#include <catch2/catch_amalgamated.hpp>

#include "rmc/transducer.hpp"
#include "support.hpp"

using namespace rmc;
using rmctest::all_words;
using rmctest::Rng;

namespace {

Alphabet unary() { return Alphabet::of_names({"a"}); }

Word an(std::size_t n) { return Word(n, intern("a")); }

// {(a^n, a^{n+1})} over a*
Transducer successor() {
    Alphabet tr = unary();
    Nfa base(pair_alphabet(tr));
    State s0 = base.add_state(), s1 = base.add_state();
    base.add_initial(s0);
    base.add_final(s1);
    base.add_transition(s0, pair_symbol(intern("a"), intern("a")), s0);
    base.add_transition(s0, pair_symbol(SymbolTable::pad, intern("a")), s1);
    base.finish();
    return normalize_convolutions({tr, base});
}

Transducer relation_of_pairs(const Alphabet& tr, const std::vector<std::pair<Word, Word>>& pairs) {
    Nfa base = empty_nfa(pair_alphabet(tr));
    for (const auto& [x, y] : pairs)
        base = unite(base, singleton_nfa(pair_alphabet(tr), convolve(x, y)));
    return normalize_convolutions({tr, base});
}

Transducer random_relation(Rng& rng, const Alphabet& tr, std::uint32_t n_states,
                           std::uint32_t n_transitions) {
    Nfa base = rmctest::random_nfa(rng, pair_alphabet(tr), n_states, n_transitions);
    return normalize_convolutions({tr, base});
}

}  // namespace

TEST_CASE("convolution pads the shorter word") {
    Word ab = word_of_names({"a", "b"});
    Word abb = word_of_names({"a", "b", "b"});
    Word conv = convolve(ab, abb);
    REQUIRE(conv.size() == 3);
    CHECK(conv[0] == pair_symbol(intern("a"), intern("a")));
    CHECK(conv[1] == pair_symbol(intern("b"), intern("b")));
    CHECK(conv[2] == pair_symbol(SymbolTable::pad, intern("b")));

    CHECK(convolve({}, {}).empty());

    Word diag = convolve(ab, ab);
    REQUIRE(diag.size() == 2);
    CHECK(diag[0] == pair_symbol(intern("a"), intern("a")));
    CHECK(diag[1] == pair_symbol(intern("b"), intern("b")));

    auto [x, y] = deconvolve(conv);
    CHECK(x == ab);
    CHECK(y == abb);
}

TEST_CASE("normalization removes padding violations and nothing else") {
    Alphabet tr = unary();
    Symbol a = intern("a");
    // accepts the invalid word (a,_)(a,a)
    Nfa bad(pair_alphabet(tr));
    State s0 = bad.add_state(), s1 = bad.add_state(), s2 = bad.add_state();
    bad.add_initial(s0);
    bad.add_final(s2);
    bad.add_transition(s0, pair_symbol(a, SymbolTable::pad), s1);
    bad.add_transition(s1, pair_symbol(a, a), s2);
    bad.finish();
    Transducer t{tr, bad};
    Transducer n = normalize_convolutions(t);
    CHECK(is_empty(n.base).empty);

    Transducer succ = successor();
    Transducer again = normalize_convolutions(succ);
    CHECK(rel_equal(succ, again));
}

TEST_CASE("normalization preserves the recognized relation") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Rng rng(0x1001);
    for (int round = 0; round < 6; ++round) {
        Nfa raw = rmctest::random_nfa(rng, pair_alphabet(tr), 4, 10);
        Transducer t{tr, raw};
        Transducer n = normalize_convolutions(t);
        for (const auto& x : all_words(tr, 4))
            for (const auto& y : all_words(tr, 4)) {
                bool raw_member = member(raw, convolve(x, y));
                CHECK(member_pair(n, x, y) == raw_member);
            }
    }
}

TEST_CASE("identity relation") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Nfa just_ab = singleton_nfa(tr, word_of_names({"a", "b"}));
    Transducer id = identity_on(just_ab);
    CHECK(member_pair(id, word_of_names({"a", "b"}), word_of_names({"a", "b"})));
    CHECK_FALSE(member_pair(id, word_of_names({"a", "b"}), word_of_names({"b", "a"})));

    Transducer ide = identity_on(empty_nfa(tr));
    CHECK(is_empty(ide.base).empty);

    Transducer ida = identity_on(universal_nfa(unary()));
    for (std::size_t n = 0; n <= 5; ++n) CHECK(member_pair(ida, an(n), an(n)));
    CHECK_FALSE(member_pair(ida, an(2), an(3)));
}

TEST_CASE("composition of successor with itself") {
    Transducer succ = successor();
    Transducer two = compose(succ, succ);
    for (std::size_t n = 0; n <= 5; ++n) {
        CHECK(member_pair(two, an(n), an(n + 2)));
        CHECK_FALSE(member_pair(two, an(n), an(n + 1)));
        CHECK_FALSE(member_pair(two, an(n), an(n)));
    }
}

TEST_CASE("composition with identity and with the empty relation") {
    Alphabet tr = unary();
    Transducer succ = successor();
    Transducer id = identity_on(universal_nfa(tr));
    Transducer left = compose(id, succ);
    Transducer right = compose(succ, id);
    for (std::size_t n = 0; n <= 4; ++n) {
        CHECK(member_pair(left, an(n), an(n + 1)));
        CHECK(member_pair(right, an(n), an(n + 1)));
        CHECK_FALSE(member_pair(left, an(n), an(n)));
    }
    Transducer none = compose(succ, empty_relation(tr));
    CHECK(is_empty(none.base).empty);
}

TEST_CASE("composition through a longer middle word") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Word a1 = word_of_names({"a"});
    Word bbb = word_of_names({"b", "b", "b"});
    Word b1 = word_of_names({"b"});
    Transducer r = relation_of_pairs(tr, {{a1, bbb}});
    Transducer s = relation_of_pairs(tr, {{bbb, b1}});
    Transducer c = compose(r, s);
    CHECK(member_pair(c, a1, b1));
    CHECK_FALSE(member_pair(c, a1, bbb));
    CHECK_FALSE(member_pair(c, b1, b1));
}

TEST_CASE("composition associativity on sampled memberships") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Rng rng(0x1002);
    for (int round = 0; round < 4; ++round) {
        Transducer r = random_relation(rng, tr, 3, 9);
        Transducer s = random_relation(rng, tr, 3, 9);
        Transducer t = random_relation(rng, tr, 3, 9);
        Transducer left = compose(compose(r, s), t);
        Transducer right = compose(r, compose(s, t));
        for (const auto& x : all_words(tr, 3))
            for (const auto& z : all_words(tr, 3))
                CHECK(member_pair(left, x, z) == member_pair(right, x, z));
    }
}

TEST_CASE("inverse of successor is predecessor") {
    Transducer pred = rel_inverse(successor());
    for (std::size_t n = 0; n <= 5; ++n) {
        CHECK(member_pair(pred, an(n + 1), an(n)));
        CHECK_FALSE(member_pair(pred, an(n), an(n + 1)));
    }
}

TEST_CASE("inverse is an involution and fixes the identity") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Transducer id = identity_on(universal_nfa(tr));
    CHECK(rel_equal(rel_inverse(id), id));

    Rng rng(0x1003);
    Transducer r = random_relation(rng, tr, 4, 12);
    Transducer rr = rel_inverse(rel_inverse(r));
    for (const auto& x : all_words(tr, 3))
        for (const auto& y : all_words(tr, 3)) CHECK(member_pair(rr, x, y) == member_pair(r, x, y));
}

TEST_CASE("restriction to even-length words empties the successor") {
    Alphabet tr = unary();
    // (aa)*
    Nfa even(tr);
    State e0 = even.add_state(), e1 = even.add_state();
    even.add_initial(e0);
    even.add_final(e0);
    even.add_transition(e0, intern("a"), e1);
    even.add_transition(e1, intern("a"), e0);
    even.finish();

    Transducer succ = successor();
    Transducer restricted = rel_restrict(succ, even, even);
    CHECK(is_empty(restricted.base).empty);
    for (std::size_t n = 0; n <= 6; ++n) CHECK_FALSE(member_pair(restricted, an(n), an(n + 1)));

    Transducer full = rel_restrict(succ, universal_nfa(tr), universal_nfa(tr));
    for (std::size_t n = 0; n <= 5; ++n) CHECK(member_pair(full, an(n), an(n + 1)));

    Transducer none = rel_restrict(succ, empty_nfa(tr), universal_nfa(tr));
    CHECK(is_empty(none.base).empty);
}

TEST_CASE("relation union and intersection") {
    Alphabet tr = unary();
    Transducer succ = successor();
    Transducer pred = rel_inverse(succ);

    Transducer withe = rel_union(succ, empty_relation(tr));
    for (std::size_t n = 0; n <= 4; ++n) CHECK(member_pair(withe, an(n), an(n + 1)));

    Transducer both = rel_union(succ, pred);
    CHECK(member_pair(both, an(1), an(2)));
    CHECK(member_pair(both, an(2), an(1)));

    Transducer id = identity_on(universal_nfa(tr));
    Transducer nothing = rel_intersect(succ, id);
    for (std::size_t n = 0; n <= 5; ++n) CHECK_FALSE(member_pair(nothing, an(n), an(n)));
    CHECK(is_empty(nothing.base).empty);
}

TEST_CASE("images of the successor relation") {
    Alphabet tr = unary();
    Transducer succ = successor();

    Nfa aaa = singleton_nfa(tr, an(3));
    Nfa pre = pre_image(succ, aaa);
    CHECK(member(pre, an(2)));
    CHECK_FALSE(member(pre, an(3)));
    CHECK_FALSE(member(pre, an(1)));

    Nfa nothing = pre_image(succ, empty_nfa(tr));
    CHECK(is_empty(nothing).empty);
    CHECK(is_empty(post_image(succ, empty_nfa(tr))).empty);

    Nfa all_pre = pre_image(succ, universal_nfa(tr));
    for (std::size_t n = 0; n <= 6; ++n) CHECK(member(all_pre, an(n)));

    Nfa post = post_image(succ, singleton_nfa(tr, an(3)));
    CHECK(member(post, an(4)));
    CHECK_FALSE(member(post, an(3)));
}

TEST_CASE("pair membership basics") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Transducer id = identity_on(universal_nfa(tr));
    CHECK(member_pair(id, word_of_names({"a", "b"}), word_of_names({"a", "b"})));
    CHECK_FALSE(member_pair(id, word_of_names({"a", "b"}), word_of_names({"a", "b", "b"})));

    Transducer succ = successor();
    CHECK(member_pair(succ, an(3), an(4)));
    CHECK_FALSE(member_pair(succ, an(3), an(5)));
}

TEST_CASE("Galois duality between images and pair membership") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Rng rng(0x1004);
    Transducer r = random_relation(rng, tr, 4, 14);
    for (const auto& x : all_words(tr, 3))
        for (const auto& y : all_words(tr, 3)) {
            bool direct = member_pair(r, x, y);
            CHECK(direct == member(pre_image(r, singleton_nfa(tr, y)), x));
            CHECK(direct == member(post_image(r, singleton_nfa(tr, x)), y));
        }
}

TEST_CASE("accepted words of normalized transducers are valid convolutions") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Rng rng(0x1005);
    Transducer r = random_relation(rng, tr, 5, 18);
    for (const auto& pw : enumerate_accepted(r.base, 5)) {
        bool left_dead = false, right_dead = false, ok = true;
        for (Symbol s : pw) {
            auto parts = SymbolTable::instance().pair_parts(s);
            if (parts->first == SymbolTable::pad)
                left_dead = true;
            else if (left_dead)
                ok = false;
            if (parts->second == SymbolTable::pad)
                right_dead = true;
            else if (right_dead)
                ok = false;
        }
        CHECK(ok);
    }
}

TEST_CASE("transitive closure of a finite relation converges") {
    Alphabet tr = Alphabet::of_names({"a", "b", "c"});
    Word wa = word_of_names({"a"});
    Word wb = word_of_names({"b"});
    Word wc = word_of_names({"c"});
    Transducer r = relation_of_pairs(tr, {{wa, wb}, {wb, wc}});
    ClosureOutcome out = transitive_closure_semi(r, 64);
    REQUIRE(out.status == ClosureStatus::Converged);
    CHECK(out.iterations == 2);
    CHECK(member_pair(out.relation, wa, wb));
    CHECK(member_pair(out.relation, wb, wc));
    CHECK(member_pair(out.relation, wa, wc));
    CHECK_FALSE(member_pair(out.relation, wc, wa));

    // brute-force closure of the 3-element graph for cross-checking
    Transducer expected = relation_of_pairs(tr, {{wa, wb}, {wb, wc}, {wa, wc}});
    CHECK(rel_equal(out.relation, expected));
}

TEST_CASE("transitive closure of the identity converges immediately") {
    Transducer id = identity_on(universal_nfa(unary()));
    ClosureOutcome out = transitive_closure_semi(id, 8);
    REQUIRE(out.status == ClosureStatus::Converged);
    CHECK(out.iterations == 1);
    CHECK(rel_equal(out.relation, id));
}

TEST_CASE("transitive closure of the successor diverges with growing iterates") {
    Transducer succ = successor();
    // iterates 1..4 all differ under the exact equivalence test
    Transducer prev = succ;
    for (int k = 0; k < 4; ++k) {
        Transducer next = rel_union(succ, compose(succ, prev));
        CHECK_FALSE(rel_equal(next, prev));
        prev = next;
    }
    ClosureOutcome out = transitive_closure_semi(succ, 6);
    CHECK(out.status == ClosureStatus::Diverged);
    CHECK(out.iterations == 6);
    // the union of iterates is still sound
    CHECK(member_pair(out.relation, an(0), an(3)));
}

TEST_CASE("converged closures are transitive on samples") {
    Alphabet tr = Alphabet::of_names({"a", "b"});
    Rng rng(0x1006);
    for (int round = 0; round < 4; ++round) {
        std::vector<std::pair<Word, Word>> pairs;
        for (int i = 0; i < 4; ++i)
            pairs.emplace_back(rmctest::random_word(rng, tr, 2), rmctest::random_word(rng, tr, 2));
        Transducer r = relation_of_pairs(tr, pairs);
        ClosureOutcome out = transitive_closure_semi(r, 64);
        if (out.status != ClosureStatus::Converged) continue;
        auto words = all_words(tr, 2);
        for (const auto& x : words)
            for (const auto& y : words) {
                if (!member_pair(out.relation, x, y)) continue;
                for (const auto& z : words)
                    if (member_pair(out.relation, y, z)) CHECK(member_pair(out.relation, x, z));
            }
    }
}
