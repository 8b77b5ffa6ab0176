#include <catch2/catch_amalgamated.hpp>

#include "formula_gen.hpp"
#include "rmc/engines.hpp"
#include "support.hpp"

using namespace rmc;
using rmctest::Rng;

namespace {

Pds push_pop() {
    Pds p;
    p.actions = Alphabet::of_names({"a", "b"});
    p.stack = Alphabet::of_names({"A"});
    p.controls = Alphabet::of_names({"q"});
    p.rules.push_back({intern("q"), intern("A"), intern("a"), intern("q"),
                       {intern("A"), intern("A")}});
    p.rules.push_back({intern("q"), intern("A"), intern("b"), intern("q"), {}});
    return validate_pds(p);
}

Word qa(std::size_t n) {
    Word w{intern("q")};
    w.insert(w.end(), n, intern("A"));
    return w;
}

Transducer successor_closure() {
    Alphabet tr = Alphabet::of_names({"a"});
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

/// Test-only provider with externally supplied closures.
class FixedProvider final : public ClosureProvider {
public:
    FixedProvider(AutomaticPresentation pres, std::map<std::vector<Symbol>, Transducer> closures)
        : pres_(std::move(pres)), closures_(std::move(closures)) {}

    const AutomaticPresentation& presentation() const override { return pres_; }
    Capabilities capabilities() const override { return {true, true, true}; }
    std::string id() const override { return "fixed"; }
    SystemProduct product(const FiniteSystem&) const override {
        throw InputError("fixed provider has no product construction");
    }

protected:
    ClosureResult compute_closure(const std::vector<Symbol>& acts) override {
        auto it = closures_.find(acts);
        if (it == closures_.end()) throw InputError("fixed provider: unexpected action subset");
        return {ClosureStatus::Converged, it->second, 1};
    }

private:
    AutomaticPresentation pres_;
    std::map<std::vector<Symbol>, Transducer> closures_;
};

AutomaticPresentation two_state_cycle() {
    // n0 -a-> n1 -a-> n0, no b-steps anywhere
    Alphabet tr = Alphabet::of_names({"n0", "n1"});
    Alphabet acts = Alphabet::of_names({"a", "b"});
    Nfa dom(tr);
    State i = dom.add_state(), f = dom.add_state();
    dom.add_initial(i);
    dom.add_final(f);
    dom.add_transition(i, intern("n0"), f);
    dom.add_transition(i, intern("n1"), f);
    dom.finish();
    Nfa base = unite(
        singleton_nfa(pair_alphabet(tr), convolve({intern("n0")}, {intern("n1")})),
        singleton_nfa(pair_alphabet(tr), convolve({intern("n1")}, {intern("n0")})));
    AutomaticPresentation p;
    p.actions = acts;
    p.domain = dom;
    p.rel.emplace(intern("a"), normalize_convolutions({tr, base}));
    p.rel.emplace(intern("b"), empty_relation(tr));
    return validate_presentation(std::move(p));
}

}  // namespace

TEST_CASE("exact engine: push-pop system violates always-a") {
    Pds p = push_pop();
    ltl::LtlFormula phi = ltl::parse("G a", p.actions);
    CheckResult r = check_pds_bem(p, phi, qa(1));
    CHECK(r.verdict == Verdict::Violated);
    REQUIRE(r.witness.has_value());
    REQUIRE(r.witness->lasso.has_value());
    CHECK(r.certificate_validated);
    auto [u, v] = *r.witness->lasso;
    CHECK(ltl::lasso_sat(u, v, ltl::negated(phi)));
}

TEST_CASE("exact engine: push-pop system satisfies recurrent a") {
    Pds p = push_pop();
    ltl::LtlFormula phi = ltl::parse("Gs Fs a", p.actions);
    CheckResult r = check_pds_bem(p, phi, qa(1));
    CHECK(r.verdict == Verdict::Holds);
}

TEST_CASE("exact engine: pop-only systems hold vacuously") {
    Pds p;
    p.actions = Alphabet::of_names({"a"});
    p.stack = Alphabet::of_names({"A"});
    p.controls = Alphabet::of_names({"q"});
    p.rules.push_back({intern("q"), intern("A"), intern("a"), intern("q"), {}});
    p = validate_pds(p);
    for (const char* f : {"G a", "F a", "false"}) {
        CheckResult r = check_pds_bem(p, ltl::parse(f, p.actions), qa(3));
        CHECK(r.verdict == Verdict::Holds);
    }
}

TEST_CASE("product engine: push-pop system violates always-a") {
    Pds pds = push_pop();
    PdsProvider provider(pds);
    ltl::LtlFormula phi = ltl::parse("G a", pds.actions);
    CheckResult r = check_ltl_product(provider, phi, qa(1));
    CHECK(r.verdict == Verdict::Violated);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->chain.size() == 10);
    CHECK(r.certificate_validated);

    CheckResult bem = check_pds_bem(pds, phi, qa(1));
    CHECK(bem.verdict == r.verdict);
}

TEST_CASE("product engine: deadlocked initial state holds vacuously") {
    Pds pds = push_pop();
    PdsProvider provider(pds);
    for (const char* f : {"G a", "F b", "false"}) {
        CheckResult r = check_ltl_product(provider, ltl::parse(f, pds.actions), qa(0));
        CHECK(r.verdict == Verdict::Holds);
        CHECK(r.note.find("vacuous") != std::string::npos);
    }
}

TEST_CASE("product engine: successor system satisfies always-a") {
    AutomaticPresentation p = successor_system();
    GenericProvider provider(p, 16, Capabilities{true, true, true});
    ltl::LtlFormula phi = ltl::parse("G a", p.actions);
    CheckResult r = check_ltl_product(provider, phi, {intern("a")});
    CHECK(r.verdict == Verdict::Holds);
}

TEST_CASE("fair chain relation degenerates to the closure without obligations") {
    AutomaticPresentation p = successor_system();
    std::map<std::vector<Symbol>, Transducer> closures;
    closures.emplace(std::vector<Symbol>{intern("a")}, successor_closure());
    FixedProvider provider(p, std::move(closures));
    FairChainResult g = fair_chain_relation(provider, {intern("a")}, {});
    REQUIRE(g.available);
    CHECK(rel_equal(g.relation, successor_closure()));
}

TEST_CASE("fair chain relation with a trivial obligation equals the closure on samples") {
    AutomaticPresentation p = successor_system();
    std::map<std::vector<Symbol>, Transducer> closures;
    closures.emplace(std::vector<Symbol>{intern("a")}, successor_closure());
    FixedProvider provider(p, std::move(closures));
    FairChainResult g = fair_chain_relation(provider, {intern("a")}, {{intern("a")}});
    REQUIRE(g.available);
    Transducer expect = successor_closure();
    for (std::size_t n = 0; n <= 5; ++n)
        for (std::size_t m = 0; m <= 6; ++m)
            CHECK(member_pair(g.relation, Word(n, intern("a")), Word(m, intern("a"))) ==
                  member_pair(expect, Word(n, intern("a")), Word(m, intern("a"))));
}

TEST_CASE("fair chain relation on the push-pop system") {
    Pds pds = push_pop();
    PdsProvider provider(pds);
    FairChainResult g = fair_chain_relation(provider, {intern("a"), intern("b")}, {{intern("b")}});
    REQUIRE(g.available);
    // reach q·A again through a push and a pop, with the pop hitting the
    // fairness letter
    CHECK(member_pair(g.relation, qa(1), qa(1)));

    // unsatisfiable obligation: empty relation
    FairChainResult none = fair_chain_relation(provider, {intern("a")}, {{intern("b")}});
    REQUIRE(none.available);
    CHECK(is_empty(none.relation.base).empty);
}

TEST_CASE("fair chain relations are transitive on samples") {
    Pds pds = push_pop();
    PdsProvider provider(pds);
    FairChainResult g = fair_chain_relation(provider, {intern("a"), intern("b")}, {{intern("b")}});
    REQUIRE(g.available);
    std::vector<Word> configs;
    for (std::size_t n = 0; n <= 4; ++n) configs.push_back(qa(n));
    for (const auto& x : configs)
        for (const auto& y : configs) {
            if (!member_pair(g.relation, x, y)) continue;
            for (const auto& z : configs)
                if (member_pair(g.relation, y, z)) CHECK(member_pair(g.relation, x, z));
        }
}

TEST_CASE("path engine: successor system satisfies always-a via the negation translation") {
    AutomaticPresentation p = successor_system();
    GenericProvider provider(p, 8, Capabilities{true, false, false});
    ltl::LtlFormula phi = ltl::parse("G a", p.actions);
    Owfa viol = neg_det_translate(phi);
    CheckResult r = check_path_decomp(provider, viol, {intern("a")});
    CHECK(r.verdict == Verdict::Holds);
}

TEST_CASE("path engine: push-pop system satisfies recurrent a") {
    Pds pds = push_pop();
    PdsProvider provider(pds);
    ltl::LtlFormula phi = ltl::parse("Gs Fs a", pds.actions);
    Owfa viol = fg_translate(ltl::negated(phi));
    CheckResult r = check_path_decomp(provider, viol, qa(1));
    CHECK(r.verdict == Verdict::Holds);

    CheckResult bem = check_pds_bem(pds, phi, qa(1));
    CHECK(bem.verdict == Verdict::Holds);
}

TEST_CASE("path engine: finite cycle violates eventually-b with a validated chain") {
    AutomaticPresentation p = two_state_cycle();
    FiniteProvider provider(p);
    ltl::LtlFormula phi = ltl::parse("F b", p.actions);
    Nbwa neg = tableau(ltl::negated(phi));
    OneWeakResult chk = one_weak_check(neg);
    REQUIRE(chk.one_weak);
    CheckResult r = check_path_decomp(provider, owfa_from_nbwa(neg), {intern("n0")});
    CHECK(r.verdict == Verdict::Violated);
    REQUIRE(r.witness.has_value());
    CHECK(r.certificate_validated);
    CHECK(r.witness->chain.size() >= 2);
}

TEST_CASE("path engine refuses providers without the subset capability") {
    AutomaticPresentation p = successor_system();
    GenericProvider provider(p, 8, Capabilities{});
    ltl::LtlFormula phi = ltl::parse("G a", p.actions);
    CHECK_THROWS_AS(check_path_decomp(provider, neg_det_translate(phi), {intern("a")}),
                    InputError);
    CHECK_THROWS_AS(check_ltl_product(provider, phi, {intern("a")}), InputError);
}

TEST_CASE("product engine emits complementary sets on deadlock-free finite systems") {
    AutomaticPresentation p = two_state_cycle();
    FiniteProvider provider(p);
    ltl::LtlFormula phi = ltl::parse("G a", p.actions);
    EngineConfig cfg;
    cfg.want_sets = true;
    cfg.want_witness = false;
    CheckResult pos = check_ltl_product(provider, phi, {intern("n0")});
    (void)pos;
    CheckResult rphi = check_ltl_product(provider, phi, {intern("n0")}, cfg);
    CheckResult rneg = check_ltl_product(provider, ltl::negated(phi), {intern("n0")}, cfg);
    REQUIRE(rphi.violating_upper.has_value());
    REQUIRE(rneg.violating_upper.has_value());
    // every state realizes a word here, so the two existential sets cover the
    // domain disjointly
    Nfa join = unite(*rphi.violating_upper, *rneg.violating_upper);
    CHECK(includes(join, p.domain).included);
    Nfa meet = intersect(*rphi.violating_lower, *rneg.violating_lower);
    CHECK(is_empty(meet).empty);
}

TEST_CASE("automatic dispatch picks fragment pipelines and agrees with the exact engine") {
    Pds pds = push_pop();
    PdsProvider provider(pds);
    struct Case {
        const char* formula;
        Verdict expect;
    };
    for (const Case& c : {Case{"G a", Verdict::Violated}, Case{"Gs Fs a", Verdict::Holds},
                          Case{"Fs b", Verdict::Unknown /*placeholder*/}}) {
        ltl::LtlFormula phi = ltl::parse(c.formula, pds.actions);
        CheckResult r = auto_check(provider, &pds, phi, qa(1));
        CheckResult bem = check_pds_bem(pds, phi, qa(1));
        if (r.verdict != Verdict::Unknown) CHECK(r.verdict == bem.verdict);
        if (c.expect != Verdict::Unknown) CHECK(bem.verdict == c.expect);
    }
}

TEST_CASE("random small systems: engines agree wherever definite") {
    Rng rng(0x8001);
    Alphabet acts = Alphabet::of_names({"a", "b"});
    int checked = 0;
    for (int round = 0; round < 12; ++round) {
        Pds p;
        p.actions = acts;
        p.stack = Alphabet::of_names({"A", "B"});
        p.controls = Alphabet::of_names({"p0", "p1"});
        auto pick = [&](const Alphabet& al) {
            return al.symbols()[rng.below(static_cast<std::uint32_t>(al.size()))];
        };
        std::uint32_t n_rules = 1 + rng.below(4);
        for (std::uint32_t i = 0; i < n_rules; ++i) {
            Word push;
            std::uint32_t len = rng.below(3);
            for (std::uint32_t j = 0; j < len; ++j) push.push_back(pick(p.stack));
            p.rules.push_back({pick(p.controls), pick(p.stack), pick(p.actions), pick(p.controls),
                               push});
        }
        p = validate_pds(p);
        Word init = pds_config(pick(p.controls), {pick(p.stack)});

        const char* formulas[] = {"G a", "F b", "Gs Fs a", "Fs Gs b", "a", "X b",
                                  "(a & true) U (!a & true)"};
        for (const char* f : formulas) {
            ltl::LtlFormula phi = ltl::parse(f, acts);
            CheckResult bem = check_pds_bem(p, phi, init);
            PdsProvider provider(p);
            CheckResult other = auto_check(provider, &p, phi, init);
            if (other.verdict != Verdict::Unknown) {
                INFO(f << " on instance " << round);
                CHECK(other.verdict == bem.verdict);
                ++checked;
            }
            PdsProvider provider2(p);
            CheckResult prod = check_ltl_product(provider2, phi, init);
            if (prod.verdict != Verdict::Unknown) {
                INFO(f << " on instance " << round << " (product)");
                CHECK(prod.verdict == bem.verdict);
                ++checked;
            }
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("one-weak product mode agrees with path decomposition") {
    Pds pds = push_pop();
    ltl::LtlFormula phi = ltl::parse("G a", pds.actions);
    Owfa viol = neg_det_translate(phi);
    PdsProvider p1(pds), p2(pds);
    CheckResult via_product = check_ltl_product_oneweak(p1, viol, qa(1));
    CheckResult via_path = check_path_decomp(p2, viol, qa(1));
    if (via_product.verdict != Verdict::Unknown && via_path.verdict != Verdict::Unknown)
        CHECK(via_product.verdict == via_path.verdict);
    CheckResult bem = check_pds_bem(pds, phi, qa(1));
    if (via_path.verdict != Verdict::Unknown) CHECK(via_path.verdict == bem.verdict);
}

TEST_CASE("finite provider computes explicit graph closures") {
    // chain n0 -> n1 -> n2
    Alphabet tr = Alphabet::of_names({"n0", "n1", "n2"});
    Alphabet acts = Alphabet::of_names({"s"});
    Nfa dom(tr);
    State i = dom.add_state(), f = dom.add_state();
    dom.add_initial(i);
    dom.add_final(f);
    for (Symbol s : tr) dom.add_transition(i, s, f);
    dom.finish();
    auto pair_word = [&](const char* a, const char* b) {
        return convolve({intern(a)}, {intern(b)});
    };
    Nfa base = unite(singleton_nfa(pair_alphabet(tr), pair_word("n0", "n1")),
                     singleton_nfa(pair_alphabet(tr), pair_word("n1", "n2")));
    AutomaticPresentation pres;
    pres.actions = acts;
    pres.domain = dom;
    pres.rel.emplace(intern("s"), normalize_convolutions(Transducer{tr, base}));
    FiniteProvider provider(pres);
    const ClosureResult& c = provider.closure(acts.symbols());
    REQUIRE(c.status == ClosureStatus::Converged);
    CHECK(member_pair(c.relation, {intern("n0")}, {intern("n1")}));
    CHECK(member_pair(c.relation, {intern("n1")}, {intern("n2")}));
    CHECK(member_pair(c.relation, {intern("n0")}, {intern("n2")}));
    CHECK_FALSE(member_pair(c.relation, {intern("n2")}, {intern("n0")}));

    // empty relation stays empty
    AutomaticPresentation none = pres;
    none.rel.clear();
    none.rel.emplace(intern("s"), empty_relation(tr));
    FiniteProvider pnone(none);
    CHECK(is_empty(pnone.closure(acts.symbols()).relation.base).empty);

    // a cycle closes into the full product of its nodes
    Nfa cyc = unite(unite(singleton_nfa(pair_alphabet(tr), pair_word("n0", "n1")),
                          singleton_nfa(pair_alphabet(tr), pair_word("n1", "n2"))),
                    singleton_nfa(pair_alphabet(tr), pair_word("n2", "n0")));
    AutomaticPresentation pc = pres;
    pc.rel.clear();
    pc.rel.emplace(intern("s"), normalize_convolutions(Transducer{tr, cyc}));
    FiniteProvider pcyc(pc);
    const Transducer& full = pcyc.closure(acts.symbols()).relation;
    for (const char* x : {"n0", "n1", "n2"})
        for (const char* y : {"n0", "n1", "n2"}) CHECK(member_pair(full, {intern(x)}, {intern(y)}));
}

TEST_CASE("generic provider matches the finite one on finite domains") {
    Alphabet tr = Alphabet::of_names({"n0", "n1"});
    Alphabet acts = Alphabet::of_names({"s"});
    Nfa dom(tr);
    State i = dom.add_state(), f = dom.add_state();
    dom.add_initial(i);
    dom.add_final(f);
    for (Symbol s : tr) dom.add_transition(i, s, f);
    dom.finish();
    Nfa base = unite(singleton_nfa(pair_alphabet(tr), convolve({intern("n0")}, {intern("n1")})),
                     singleton_nfa(pair_alphabet(tr), convolve({intern("n1")}, {intern("n0")})));
    AutomaticPresentation pres;
    pres.actions = acts;
    pres.domain = dom;
    pres.rel.emplace(intern("s"), normalize_convolutions(Transducer{tr, base}));

    FiniteProvider fin{pres};
    GenericProvider gen{pres, 32};
    const ClosureResult& cf = fin.closure(acts.symbols());
    const ClosureResult& cg = gen.closure(acts.symbols());
    REQUIRE(cg.status == ClosureStatus::Converged);
    CHECK(rel_equal(cf.relation, cg.relation));
}

TEST_CASE("generic provider surfaces divergence and converges on identities") {
    AutomaticPresentation p = successor_system();
    GenericProvider gen{p, 6};
    const ClosureResult& diverged = gen.closure(p.actions.symbols());
    CHECK(diverged.status == ClosureStatus::Diverged);
    CHECK(diverged.iterations == 6);

    AutomaticPresentation idp;
    idp.actions = Alphabet::of_names({"s"});
    Alphabet tr = Alphabet::of_names({"a"});
    idp.domain = universal_nfa(tr);
    idp.rel.emplace(intern("s"), identity_on(universal_nfa(tr)));
    GenericProvider gid{idp, 8};
    const ClosureResult& c = gid.closure(idp.actions.symbols());
    CHECK(c.status == ClosureStatus::Converged);
    CHECK(c.iterations == 1);
}

TEST_CASE("pushdown product closures match the product presentation semantics") {
    Pds pds = push_pop();
    PdsProvider provider(pds);
    // two-state control flipping on every action
    FiniteSystem f;
    f.num_states = 2;
    f.initials = {0};
    for (Symbol a : pds.actions.symbols()) {
        f.steps.push_back({0, a, 1});
        f.steps.push_back({1, a, 0});
    }
    SystemProduct prod = provider.product(f);
    const Transducer& closure = prod.provider->closure(pds.actions.symbols()).relation;

    // explicit BFS over the product presentation's one-step relations
    auto one_step = [&](const Word& x) {
        std::vector<Word> out;
        for (Symbol a : pds.actions.symbols()) {
            Nfa post = post_image(prod.encoding.pres.relation(a),
                                  singleton_nfa(prod.encoding.pres.domain.alphabet, x));
            for (const auto& y : enumerate_accepted(post, x.size() + 2)) out.push_back(y);
        }
        return out;
    };
    for (std::size_t n = 1; n <= 2; ++n) {
        Word start = prod.encoding.encode(0, qa(n));
        std::set<Word> reach;
        std::deque<std::pair<Word, int>> bfs{{start, 0}};
        std::set<Word> seen{start};
        while (!bfs.empty()) {
            auto [cur, d] = bfs.front();
            bfs.pop_front();
            if (d == 6) continue;
            for (const auto& nxt : one_step(cur)) {
                reach.insert(nxt);
                if (seen.insert(nxt).second) bfs.emplace_back(nxt, d + 1);
            }
        }
        for (const auto& y : reach) CHECK(member_pair(closure, start, y));
        // sampled members of bounded size are reachable
        int taken = 0;
        for (const auto& pw : enumerate_accepted(closure.base, 2 + n + 4)) {
            if (taken >= 30) break;
            auto [x, y] = deconvolve(pw);
            if (x != start) continue;
            ++taken;
            if (y.size() <= n + 2 + 4) CHECK(reach.count(y));
        }
    }
}

TEST_CASE("finite provider rejects infinite domains") {
    AutomaticPresentation p = successor_system();
    CHECK_THROWS_AS(FiniteProvider{p}, InputError);
}
