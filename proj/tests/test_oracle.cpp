#include <catch2/catch_amalgamated.hpp>

#include "rmc/oracle.hpp"
#include "support.hpp"

using namespace rmc;

namespace {

AutomaticPresentation successor_system() {
    Alphabet tr = Alphabet::of_names({"a"});
    Nfa base(pair_alphabet(tr));
    State s0 = base.add_state(), s1 = base.add_state();
    base.add_initial(s0);
    base.add_final(s1);
    Symbol a = intern("a");
    base.add_transition(s0, pair_symbol(a, a), s0);
    base.add_transition(s0, pair_symbol(SymbolTable::pad, a), s1);
    base.finish();
    AutomaticPresentation p;
    p.actions = Alphabet::of_names({"a"});
    p.domain = universal_nfa(tr);
    p.rel.emplace(a, normalize_convolutions({tr, base}));
    return validate_presentation(std::move(p));
}

AutomaticPresentation self_loop_node() {
    Alphabet tr = Alphabet::of_names({"n0"});
    Nfa dom(tr);
    State i = dom.add_state(), f = dom.add_state();
    dom.add_initial(i);
    dom.add_final(f);
    dom.add_transition(i, intern("n0"), f);
    dom.finish();
    AutomaticPresentation p;
    p.actions = Alphabet::of_names({"a", "b"});
    p.domain = dom;
    p.rel.emplace(intern("a"),
                  normalize_convolutions(Transducer{
                      tr, singleton_nfa(pair_alphabet(tr), convolve({intern("n0")}, {intern("n0")}))}));
    p.rel.emplace(intern("b"), empty_relation(tr));
    return validate_presentation(std::move(p));
}

}  // namespace

TEST_CASE("bounded exploration flags escaping frontiers") {
    AutomaticPresentation p = successor_system();
    FiniteGraph g = bounded_graph(p, {intern("a")}, 3);
    CHECK(g.bound == GraphBound::FrontierEscaped);
    CHECK(g.nodes.size() == 3);  // a, aa, aaa
}

TEST_CASE("bounded exploration of pop chains is complete") {
    Pds p;
    p.actions = Alphabet::of_names({"a"});
    p.stack = Alphabet::of_names({"A"});
    p.controls = Alphabet::of_names({"q"});
    p.rules.push_back({intern("q"), intern("A"), intern("a"), intern("q"), {}});
    p = validate_pds(p);
    AutomaticPresentation pres = pds_to_presentation(p);
    Word init = pds_config(intern("q"), Word(3, intern("A")));
    FiniteGraph g = bounded_graph(pres, init, 4);
    CHECK(g.bound == GraphBound::Complete);
    CHECK(g.nodes.size() == 4);
}

TEST_CASE("explicit presentations explore isomorphically") {
    AutomaticPresentation p = self_loop_node();
    FiniteGraph g = bounded_graph(p, {intern("n0")}, 1);
    CHECK(g.bound == GraphBound::Complete);
    CHECK(g.nodes.size() == 1);
    CHECK(g.edges.size() == 1);
}

TEST_CASE("graph oracle basics") {
    AutomaticPresentation p = self_loop_node();
    FiniteGraph g = bounded_graph(p, {intern("n0")}, 1);
    Alphabet acts = p.actions;
    CHECK(finite_model_check(g, ltl::parse("G a", acts)).verdict == Verdict::Holds);
    FiniteCheckResult r = finite_model_check(g, ltl::parse("F b", acts));
    CHECK(r.verdict == Verdict::Violated);
    REQUIRE(r.lasso.has_value());
    CHECK(ltl::lasso_sat(r.lasso->first, r.lasso->second, ltl::negated(ltl::parse("F b", acts))));
}

TEST_CASE("deadlocked graphs hold vacuously when no cycle exists") {
    Pds p;
    p.actions = Alphabet::of_names({"a"});
    p.stack = Alphabet::of_names({"A"});
    p.controls = Alphabet::of_names({"q"});
    p.rules.push_back({intern("q"), intern("A"), intern("a"), intern("q"), {}});
    p = validate_pds(p);
    AutomaticPresentation pres = pds_to_presentation(p);
    FiniteGraph g = bounded_graph(pres, pds_config(intern("q"), Word(2, intern("A"))), 3);
    REQUIRE(g.bound == GraphBound::Complete);
    for (const char* f : {"G a", "false", "F a"})
        CHECK(finite_model_check(g, ltl::parse(f, pres.actions)).verdict == Verdict::Holds);
}

TEST_CASE("universal and existential oracle verdicts are dual") {
    AutomaticPresentation p = self_loop_node();
    FiniteGraph g = bounded_graph(p, {intern("n0")}, 1);
    for (const auto& f : suite_formulas()) {
        ltl::LtlFormula phi = ltl::parse(f, p.actions);
        FiniteCheckResult uni = finite_model_check(g, phi);
        FiniteCheckResult ex = finite_model_check(g, ltl::negated(phi), /*existential=*/true);
        // all realized words satisfy phi iff no realized word satisfies ¬phi
        CHECK((uni.verdict == Verdict::Holds) == (ex.verdict == Verdict::Violated));
    }
}

TEST_CASE("oracle on complete graphs matches chain analysis") {
    // pop chain: no cycles at all, chain sets must be empty
    Pds p;
    p.actions = Alphabet::of_names({"a"});
    p.stack = Alphabet::of_names({"A"});
    p.controls = Alphabet::of_names({"q"});
    p.rules.push_back({intern("q"), intern("A"), intern("a"), intern("q"), {}});
    p = validate_pds(p);
    Transducer closure = pds_closure(p, p.actions.symbols());
    RecurrenceConfig rc;
    rc.decreasing_shortcut = true;
    RecurrenceResult rr = infinite_chain(closure, rc);
    CHECK(is_empty(rr.lower).empty);
    CHECK(rr.status == BoundStatus::Converged);
    CHECK(is_empty(rr.upper).empty);
}

TEST_CASE("small committed cross-check run is clean") {
    CrossCheckConfig cfg;
    cfg.seed = 7;
    cfg.pds_instances = 12;
    cfg.formulas_per_instance = 2;
    cfg.product_every = 3;
    cfg.finite_instances = 4;
    cfg.translation_formulas = 10;
    cfg.lassos_per_formula = 5;
    cfg.include_curated = true;
    CrossCheckReport rep = cross_check(cfg);
    for (const auto& f : rep.failures) {
        INFO(f);
        CHECK(false);
    }
    CHECK(rep.ok());
    CHECK(rep.curated_definite == rep.curated_total);
    CHECK(rep.checks == 24);
    CHECK(rep.translation_checks == 50);
}

TEST_CASE("suite generation is reproducible") {
    SeededRng a(42), b(42);
    for (int i = 0; i < 5; ++i) {
        Pds p1 = suite_random_pds(a);
        Pds p2 = suite_random_pds(b);
        REQUIRE(p1.rules.size() == p2.rules.size());
        for (std::size_t k = 0; k < p1.rules.size(); ++k) {
            CHECK(p1.rules[k].control == p2.rules[k].control);
            CHECK(p1.rules[k].top == p2.rules[k].top);
            CHECK(p1.rules[k].action == p2.rules[k].action);
            CHECK(p1.rules[k].push == p2.rules[k].push);
        }
    }
}
