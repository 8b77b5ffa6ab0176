#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "rmc/io.hpp"
#include "support.hpp"

using namespace rmc;
using rmctest::Rng;

TEST_CASE("automaton files round-trip to language-equivalent objects") {
    Rng rng(0x9001);
    Alphabet ab = Alphabet::of_names({"a", "b"});
    for (int round = 0; round < 10; ++round) {
        Nfa a = rmctest::random_nfa(rng, ab, 4, 8);
        std::stringstream buf;
        write_nfa(buf, a);
        Nfa b = read_nfa(buf);
        CHECK(equivalent(a, b).equal);
        // canonical writers are stable
        std::stringstream buf2;
        write_nfa(buf2, b);
        std::stringstream buf3;
        write_nfa(buf3, read_nfa(buf2));
        CHECK(buf2.str() == buf3.str());
    }
}

TEST_CASE("transducer files round-trip and reject bad letters") {
    Rng rng(0x9002);
    Alphabet ab = Alphabet::of_names({"a", "b"});
    for (int round = 0; round < 10; ++round) {
        Nfa raw = rmctest::random_nfa(rng, pair_alphabet(ab), 4, 10);
        Transducer t = normalize_convolutions({ab, raw});
        std::stringstream buf;
        write_transducer(buf, t);
        Transducer back = read_transducer(buf);
        CHECK(rel_equal(t, back));
    }

    std::stringstream bad("alphabet: a\nstates: 1\ninitial: 0\nfinal: 0\n0 _/_ 0\n");
    CHECK_THROWS_AS(read_transducer(bad), InputError);
}

TEST_CASE("pushdown files round-trip") {
    std::stringstream buf(
        "actions: a b\nstack: A B\ncontrols: q r\nq A a r AB\nr B b q -\nq B a q BBB\n");
    Pds p = read_pds(buf);
    CHECK(p.rules.size() == 3);
    CHECK(p.rules[0].push == Word{intern("A"), intern("B")});
    CHECK(p.rules[1].push.empty());
    CHECK(p.rules[2].push.size() == 3);
    std::stringstream out;
    write_pds(out, p);
    Pds q = read_pds(out);
    CHECK(q.rules.size() == p.rules.size());
    std::stringstream out2;
    write_pds(out2, q);
    CHECK(out.str() == out2.str());
}

TEST_CASE("model files load with detected kinds") {
    std::filesystem::path root(RMC_SOURCE_DIR);
    ModelFile pds = load_model(root / "models" / "pushpop.pds");
    CHECK(pds.kind == ModelKind::Pushdown);
    REQUIRE(pds.pds.has_value());
    CHECK(pds.pds->rules.size() == 2);
    CHECK(member(pds.presentation.domain, {intern("q"), intern("A")}));

    ModelFile aps = load_model(root / "models" / "succ.aps");
    CHECK(aps.kind == ModelKind::Presentation);
    CHECK(member_pair(aps.presentation.relation(intern("a")), Word(2, intern("a")),
                      Word(3, intern("a"))));

    ModelFile fts = load_model(root / "models" / "ring.fts");
    CHECK(fts.kind == ModelKind::Finite);
    CHECK(member_pair(fts.presentation.relation(intern("a")), {intern("n0")}, {intern("n1")}));
    CHECK(is_empty(fts.presentation.relation(intern("b")).base).empty);
}

TEST_CASE("malformed files are rejected with input errors") {
    std::stringstream no_header("0 a 1\n");
    CHECK_THROWS_AS(read_nfa(no_header), InputError);
    std::stringstream bad_state("alphabet: a\nstates: 1\ninitial: 0\nfinal: 3\n");
    CHECK_THROWS_AS(read_nfa(bad_state), InputError);
    std::stringstream bad_sym("alphabet: a\nstates: 1\ninitial: 0\nfinal: 0\n0 zz 0\n");
    CHECK_THROWS_AS(read_nfa(bad_sym), InputError);
    std::stringstream multi_char_stack("actions: a\nstack: AB\ncontrols: q\n");
    CHECK_THROWS_AS(read_pds(multi_char_stack), InputError);
}
