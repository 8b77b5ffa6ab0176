/* oracle.hpp -- desk-scale reference implementations and cross-check suites.
 *
 * The oracle answers only where it is sound: explicit graphs that were
 * explored completely, and ultimately periodic words. Suite generation is
 * seeded with a portable generator, so committed runs reproduce bit for bit.
 */

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rmc/engines.hpp"
#include "rmc/graph.hpp"
#include "rmc/oneweak.hpp"
#include "rmc/presentation.hpp"
#include "rmc/tableau.hpp"

namespace rmc {

/// splitmix64; used instead of std distributions for bit-reproducibility.
struct SeededRng {
    std::uint64_t state;

    explicit SeededRng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(next() % n); }
};

enum class GraphBound { Complete, FrontierEscaped };

struct FiniteGraph {
    Alphabet actions;
    std::vector<Word> nodes;
    std::vector<std::tuple<std::uint32_t, Symbol, std::uint32_t>> edges;
    std::uint32_t initial = 0;
    GraphBound bound = GraphBound::Complete;
};

/// Explicit exploration of the system up to an encoded-state length bound.
inline FiniteGraph bounded_graph(const AutomaticPresentation& p, const Word& v0,
                                 std::size_t max_len) {
    if (v0.size() > max_len) throw InputError("length bound below the initial state");
    require_in_domain(p, v0);
    FiniteGraph g;
    g.actions = p.actions;
    std::map<Word, std::uint32_t> ids;
    std::deque<Word> todo;
    auto get = [&](const Word& w) {
        auto it = ids.find(w);
        if (it != ids.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(g.nodes.size());
        ids.emplace(w, id);
        g.nodes.push_back(w);
        todo.push_back(w);
        return id;
    };
    g.initial = get(v0);
    Nfa too_long(p.domain.alphabet);
    {
        // words strictly longer than the bound
        State cur = too_long.add_state();
        too_long.add_initial(cur);
        for (std::size_t i = 0; i <= max_len; ++i) {
            State nxt = too_long.add_state();
            for (Symbol s : p.domain.alphabet) too_long.add_transition(cur, s, nxt);
            cur = nxt;
        }
        too_long.add_final(cur);
        for (Symbol s : p.domain.alphabet) too_long.add_transition(cur, s, cur);
        too_long.finish();
    }
    while (!todo.empty()) {
        Word w = todo.front();
        todo.pop_front();
        std::uint32_t src = ids.at(w);
        for (Symbol a : p.actions) {
            Nfa post = post_image(p.relation(a), singleton_nfa(p.domain.alphabet, w));
            if (!is_empty(intersect(post, too_long)).empty) g.bound = GraphBound::FrontierEscaped;
            for (const Word& succ : enumerate_accepted(post, max_len))
                g.edges.emplace_back(src, a, get(succ));
        }
    }
    return g;
}

struct FiniteCheckResult {
    Verdict verdict = Verdict::Holds;  // always definite
    std::optional<std::pair<Word, Word>> lasso;  // action words (u, v)
};

namespace detail_oracle {

/// Reachable accepting cycle in the graph × automaton product, with a lasso.
inline std::optional<std::pair<Word, Word>> accepting_lasso(const FiniteGraph& g, const Nbwa& b) {
    if (b.num_states == 0 || g.nodes.empty()) return std::nullopt;
    const std::size_t nb = b.num_states;
    auto node = [&](std::uint32_t gn, State bs) { return gn * nb + bs; };
    std::vector<std::vector<std::pair<Symbol, State>>> badj(nb);
    for (const auto& t : b.transitions) badj[t.src].emplace_back(t.sym, t.dst);
    std::vector<std::vector<std::tuple<Symbol, std::uint32_t>>> gadj(g.nodes.size());
    for (const auto& [src, a, dst] : g.edges) gadj[src].emplace_back(a, dst);

    const std::size_t n = g.nodes.size() * nb;
    std::vector<std::vector<std::pair<Symbol, std::uint32_t>>> padj(n);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pedges;
    for (std::uint32_t gn = 0; gn < g.nodes.size(); ++gn)
        for (const auto& [a, gd] : gadj[gn])
            for (State bs = 0; bs < nb; ++bs)
                for (const auto& [ba, bd] : badj[bs])
                    if (ba == a) {
                        padj[node(gn, bs)].emplace_back(a, node(gd, bd));
                        pedges.emplace_back(node(gn, bs), node(gd, bd));
                    }
    // reachable part
    std::vector<char> reach(n, 0);
    std::deque<std::uint32_t> q;
    std::vector<int> parent(n, -1);
    std::vector<Symbol> via(n, 0);
    for (State s0 : b.initials) {
        reach[node(g.initial, s0)] = 1;
        q.push_back(node(g.initial, s0));
    }
    while (!q.empty()) {
        std::uint32_t v = q.front();
        q.pop_front();
        for (const auto& [a, w] : padj[v])
            if (!reach[w]) {
                reach[w] = 1;
                parent[w] = static_cast<int>(v);
                via[w] = a;
                q.push_back(w);
            }
    }
    graph::SccResult comps = graph::scc(n, pedges);
    std::vector<char> nontrivial(comps.count, 0);
    for (auto [x, y] : pedges)
        if (comps.comp[x] == comps.comp[y]) nontrivial[comps.comp[x]] = 1;
    std::optional<std::uint32_t> anchor;
    for (std::uint32_t v = 0; v < n && !anchor; ++v)
        if (reach[v] && b.accepting[v % nb] && nontrivial[comps.comp[v]]) anchor = v;
    if (!anchor) return std::nullopt;
    // prefix from an initial to the anchor
    Word u;
    for (std::uint32_t cur = *anchor; parent[cur] >= 0; cur = static_cast<std::uint32_t>(parent[cur]))
        u.push_back(via[cur]);
    std::reverse(u.begin(), u.end());
    // cycle: within the component, back to the anchor
    Word v;
    {
        std::vector<int> cpar(n, -1);
        std::vector<Symbol> cvia(n, 0);
        std::vector<char> cseen(n, 0);
        std::deque<std::uint32_t> cq{*anchor};
        cseen[*anchor] = 1;
        std::optional<std::uint32_t> back;
        while (!cq.empty() && !back) {
            std::uint32_t x = cq.front();
            cq.pop_front();
            for (const auto& [a, w] : padj[x]) {
                if (comps.comp[w] != comps.comp[*anchor]) continue;
                if (w == *anchor) {
                    v.push_back(a);
                    for (std::uint32_t cur = x; cpar[cur] >= 0;
                         cur = static_cast<std::uint32_t>(cpar[cur]))
                        v.push_back(cvia[cur]);
                    std::reverse(v.begin(), v.end());
                    back = w;
                    break;
                }
                if (!cseen[w]) {
                    cseen[w] = 1;
                    cpar[w] = static_cast<int>(x);
                    cvia[w] = a;
                    cq.push_back(w);
                }
            }
        }
        if (!back) return std::nullopt;
    }
    return std::make_pair(u, v);
}

}  // namespace detail_oracle

/// Exact verdict on a completely explored graph. Universal semantics by
/// default; the existential variant asks for one satisfying realized word.
inline FiniteCheckResult finite_model_check(const FiniteGraph& g, const ltl::LtlFormula& phi,
                                            bool existential = false) {
    if (g.bound != GraphBound::Complete)
        throw InputError("the oracle only answers on completely explored graphs");
    FiniteCheckResult out;
    Nbwa automaton = existential ? tableau(phi) : tableau(ltl::negated(phi));
    auto lasso = detail_oracle::accepting_lasso(g, automaton);
    if (existential) {
        out.verdict = lasso ? Verdict::Holds : Verdict::Violated;  // "exists" / "does not"
        out.lasso = lasso;
    } else {
        out.verdict = lasso ? Verdict::Violated : Verdict::Holds;
        out.lasso = lasso;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Committed suites

/// The committed 20-formula pool over actions {a, b}.
inline std::vector<std::string> suite_formulas() {
    return {
        "a",
        "X b",
        "G a",
        "X (G b)",
        "(a & true) U (!a & true)",
        "(a & X a) W (!a & b)",
        "Gs Fs a",
        "Fs Gs b",
        "Gs Fs a & Gs Fs b",
        "Fs (a & Fs b)",
        "Gs (a | Fs b)",
        "Fs a | Gs b",
        "F b",
        "G F a",
        "F (b & X b)",
        "a U (b & X a)",
        "G (a | X b)",
        "F G a",
        "X F b",
        "G (b | F a)",
    };
}

/// Seeded random pushdown system within the committed size budget.
inline Pds suite_random_pds(SeededRng& rng) {
    Pds p;
    p.actions = Alphabet::of_names({"a", "b"});
    std::uint32_t n_controls = 1 + rng.below(3);
    std::uint32_t n_stack = 1 + rng.below(2);
    std::vector<std::string> control_names;
    for (std::uint32_t i = 0; i < n_controls; ++i) control_names.push_back("p" + std::to_string(i));
    std::vector<std::string> stack_names;
    for (std::uint32_t i = 0; i < n_stack; ++i) stack_names.push_back(std::string(1, 'A' + char(i)));
    p.controls = Alphabet::of_names(control_names);
    p.stack = Alphabet::of_names(stack_names);
    auto pick = [&](const Alphabet& al) {
        return al.symbols()[rng.below(static_cast<std::uint32_t>(al.size()))];
    };
    std::uint32_t n_rules = 1 + rng.below(5);
    for (std::uint32_t i = 0; i < n_rules; ++i) {
        Word push;
        std::uint32_t len = rng.below(4);  // up to 3 exercises normalization
        for (std::uint32_t j = 0; j < len; ++j) push.push_back(pick(p.stack));
        p.rules.push_back({pick(p.controls), pick(p.stack), pick(p.actions), pick(p.controls),
                           std::move(push)});
    }
    return validate_pds(p);
}

struct CuratedCase {
    std::string name;
    Pds pds;
    std::string formula;
    Word init;
};

/// Hand-picked instances where every engine must be definite.
inline std::vector<CuratedCase> curated_suite() {
    std::vector<CuratedCase> out;
    auto push_pop = [] {
        Pds p;
        p.actions = Alphabet::of_names({"a", "b"});
        p.stack = Alphabet::of_names({"A"});
        p.controls = Alphabet::of_names({"q"});
        p.rules.push_back({intern("q"), intern("A"), intern("a"), intern("q"),
                           {intern("A"), intern("A")}});
        p.rules.push_back({intern("q"), intern("A"), intern("b"), intern("q"), {}});
        return validate_pds(p);
    };
    auto pop_only = [] {
        Pds p;
        p.actions = Alphabet::of_names({"a", "b"});
        p.stack = Alphabet::of_names({"A"});
        p.controls = Alphabet::of_names({"q"});
        p.rules.push_back({intern("q"), intern("A"), intern("b"), intern("q"), {}});
        return validate_pds(p);
    };
    auto push_only = [] {
        Pds p;
        p.actions = Alphabet::of_names({"a", "b"});
        p.stack = Alphabet::of_names({"A"});
        p.controls = Alphabet::of_names({"q"});
        p.rules.push_back({intern("q"), intern("A"), intern("a"), intern("q"),
                           {intern("A"), intern("A")}});
        return validate_pds(p);
    };
    auto two_controls = [] {
        Pds p;
        p.actions = Alphabet::of_names({"a", "b"});
        p.stack = Alphabet::of_names({"A", "B"});
        p.controls = Alphabet::of_names({"q", "r"});
        p.rules.push_back({intern("q"), intern("A"), intern("a"), intern("r"),
                           {intern("A"), intern("B")}});
        p.rules.push_back({intern("r"), intern("B"), intern("b"), intern("q"), {}});
        return validate_pds(p);
    };
    Word qA{intern("q"), intern("A")};
    Word qAA{intern("q"), intern("A"), intern("A")};
    Word q_empty{intern("q")};
    out.push_back({"pushpop-always-a", push_pop(), "G a", qA});
    out.push_back({"pushpop-recurrent-a", push_pop(), "Gs Fs a", qA});
    out.push_back({"pushpop-eventually-b", push_pop(), "F b", qA});
    out.push_back({"pushpop-first-a", push_pop(), "a", qA});
    out.push_back({"pushpop-next-b", push_pop(), "X b", qA});
    out.push_back({"pushpop-guarded-until", push_pop(), "(a & true) U (!a & true)", qA});
    out.push_back({"pushpop-recurrent-b", push_pop(), "Gs Fs b", qA});
    out.push_back({"pushpop-eventually-stable-b", push_pop(), "Fs Gs b", qA});
    out.push_back({"pushpop-deadlock-vacuous", push_pop(), "false", q_empty});
    out.push_back({"pushpop-deep-always-a", push_pop(), "G a", qAA});
    out.push_back({"poponly-vacuous-false", pop_only(), "false", qA});
    out.push_back({"poponly-vacuous-always", pop_only(), "G b", qA});
    out.push_back({"pushonly-always-a", push_only(), "G a", qA});
    out.push_back({"pushonly-eventually-b", push_only(), "F b", qA});
    out.push_back({"pushonly-recurrent-a", push_only(), "Gs Fs a", qA});
    out.push_back({"alternating-always-turns", two_controls(), "G (a | b)", qA});
    out.push_back({"alternating-recurrent-b", two_controls(), "Gs Fs b", qA});
    out.push_back({"alternating-first-a", two_controls(), "a", qA});
    out.push_back({"alternating-guarded", two_controls(), "(a & true) U (!a & true)", qA});
    out.push_back({"alternating-next-next", two_controls(), "X X a", qA});
    return out;
}

struct CrossCheckConfig {
    std::uint64_t seed = 1;
    std::uint32_t pds_instances = 200;
    std::uint32_t formulas_per_instance = 3;
    std::uint32_t product_every = 1;  // run the product engine on every k-th instance
    std::uint32_t finite_instances = 15;
    std::uint32_t translation_formulas = 60;
    std::uint32_t lassos_per_formula = 10;
    bool include_curated = true;
};

struct CrossCheckReport {
    std::uint32_t checks = 0;
    std::uint32_t definite_path = 0, path_runs = 0;
    std::uint32_t definite_product = 0, product_runs = 0;
    std::uint32_t curated_definite = 0, curated_total = 0;
    std::uint32_t finite_checks = 0;
    std::uint32_t translation_checks = 0;
    std::uint32_t disagreements = 0;
    std::uint32_t soundness_failures = 0;
    double bem_seconds = 0, path_seconds = 0, product_seconds = 0, provider_seconds = 0;
    std::vector<std::string> failures;

    bool ok() const { return disagreements == 0 && soundness_failures == 0; }
};

namespace detail_oracle {

inline double seconds_between(std::chrono::steady_clock::time_point a,
                              std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

}  // namespace detail_oracle

/// Run the committed suites and compare every definite verdict against the
/// exact engine (pushdown instances) or the explicit-graph oracle (finite
/// instances). Disagreements are failures.
inline CrossCheckReport cross_check(const CrossCheckConfig& cfg = {}) {
    using clock = std::chrono::steady_clock;
    CrossCheckReport rep;
    Alphabet acts = Alphabet::of_names({"a", "b"});
    std::vector<std::string> pool = suite_formulas();
    std::vector<ltl::LtlFormula> parsed;
    for (const auto& f : pool) parsed.push_back(ltl::parse(f, acts));

    auto record_disagreement = [&](const std::string& what) {
        ++rep.disagreements;
        rep.failures.push_back(what);
    };

    // --- random pushdown suite -------------------------------------------
    SeededRng rng(cfg.seed);
    for (std::uint32_t i = 0; i < cfg.pds_instances; ++i) {
        Pds p = suite_random_pds(rng);
        Symbol control = p.controls.symbols()[rng.below(static_cast<std::uint32_t>(
            p.controls.size()))];
        Word init = pds_config(control, {p.stack.symbols()[rng.below(static_cast<std::uint32_t>(
                                            p.stack.size()))]});
        for (std::uint32_t k = 0; k < cfg.formulas_per_instance; ++k) {
            const ltl::LtlFormula& phi = parsed[(i + 7 * k) % parsed.size()];
            ++rep.checks;
            auto t0 = clock::now();
            CheckResult bem;
            try {
                bem = check_pds_bem(p, phi, init);
            } catch (const SoundnessError& e) {
                ++rep.soundness_failures;
                rep.failures.push_back("pdsbem soundness: " + std::string(e.what()));
                continue;
            }
            rep.bem_seconds += detail_oracle::seconds_between(t0, clock::now());

            try {
                PdsProvider provider(p);
                auto t1 = clock::now();
                CheckResult other = auto_check(provider, &p, phi, init);
                rep.path_seconds += detail_oracle::seconds_between(t1, clock::now());
                rep.provider_seconds += other.provider_seconds;
                if (other.engine != "pdsbem") {
                    ++rep.path_runs;
                    if (other.verdict != Verdict::Unknown) {
                        ++rep.definite_path;
                        if (other.verdict != bem.verdict)
                            record_disagreement("instance " + std::to_string(i) + " formula '" +
                                                pool[(i + 7 * k) % pool.size()] + "': " +
                                                other.engine + " vs pdsbem");
                    }
                }
            } catch (const SoundnessError& e) {
                ++rep.soundness_failures;
                rep.failures.push_back("pathdecomp soundness: " + std::string(e.what()));
            }

            if (cfg.product_every && i % cfg.product_every == 0) {
                try {
                    PdsProvider provider(p);
                    auto t2 = clock::now();
                    CheckResult prod = check_ltl_product(provider, phi, init);
                    rep.product_seconds += detail_oracle::seconds_between(t2, clock::now());
                    ++rep.product_runs;
                    if (prod.verdict != Verdict::Unknown) {
                        ++rep.definite_product;
                        if (prod.verdict != bem.verdict)
                            record_disagreement("instance " + std::to_string(i) + " formula '" +
                                                pool[(i + 7 * k) % pool.size()] +
                                                "': product vs pdsbem");
                    }
                } catch (const SoundnessError& e) {
                    ++rep.soundness_failures;
                    rep.failures.push_back("product soundness: " + std::string(e.what()));
                }
            }
        }
    }

    // --- curated instances ------------------------------------------------
    if (cfg.include_curated) {
        for (const CuratedCase& c : curated_suite()) {
            ltl::LtlFormula phi = ltl::parse(c.formula, c.pds.actions);
            ++rep.curated_total;
            CheckResult bem = check_pds_bem(c.pds, phi, c.init);
            PdsProvider p1(c.pds), p2(c.pds);
            CheckResult prod = check_ltl_product(p1, phi, c.init);
            CheckResult other = auto_check(p2, &c.pds, phi, c.init);
            bool definite = bem.verdict != Verdict::Unknown &&
                            prod.verdict != Verdict::Unknown &&
                            other.verdict != Verdict::Unknown;
            bool agree = bem.verdict == prod.verdict &&
                         (other.engine == "pdsbem" || bem.verdict == other.verdict);
            if (definite && agree) ++rep.curated_definite;
            if (!agree)
                record_disagreement("curated '" + c.name + "': engines disagree");
            else if (!definite)
                record_disagreement("curated '" + c.name + "': an engine was not definite");
        }
    }

    // --- finite systems against the explicit oracle ------------------------
    for (std::uint32_t i = 0; i < cfg.finite_instances; ++i) {
        // random explicit graph with 2..4 nodes encoded as one-letter words
        std::uint32_t n = 2 + rng.below(3);
        std::vector<std::string> names;
        for (std::uint32_t k = 0; k < n; ++k) names.push_back("n" + std::to_string(k));
        Alphabet tr = Alphabet::of_names(names);
        Nfa dom(tr);
        State di = dom.add_state(), df = dom.add_state();
        dom.add_initial(di);
        dom.add_final(df);
        for (Symbol s : tr) dom.add_transition(di, s, df);
        dom.finish();
        AutomaticPresentation pres;
        pres.actions = acts;
        pres.domain = dom;
        std::map<Symbol, Nfa> bases;
        for (Symbol a : acts) bases.emplace(a, empty_nfa(pair_alphabet(tr)));
        std::uint32_t n_edges = 1 + rng.below(2 * n);
        for (std::uint32_t e = 0; e < n_edges; ++e) {
            Symbol a = acts.symbols()[rng.below(2)];
            Word x{tr.symbols()[rng.below(n)]};
            Word y{tr.symbols()[rng.below(n)]};
            bases[a] = unite(bases[a], singleton_nfa(pair_alphabet(tr), convolve(x, y)));
        }
        for (Symbol a : acts)
            pres.rel.emplace(a, normalize_convolutions(Transducer{tr, bases[a]}));
        pres = validate_presentation(std::move(pres));
        Word init{tr.symbols()[rng.below(n)]};
        FiniteGraph g = bounded_graph(pres, init, 1);
        if (g.bound != GraphBound::Complete) continue;
        for (std::uint32_t k = 0; k < 3; ++k) {
            const ltl::LtlFormula& phi = parsed[rng.below(static_cast<std::uint32_t>(parsed.size()))];
            FiniteCheckResult expect = finite_model_check(g, phi);
            FiniteProvider provider(pres);
            CheckResult got = check_ltl_product(provider, phi, init);
            ++rep.finite_checks;
            if (got.verdict == Verdict::Unknown || got.verdict != expect.verdict)
                record_disagreement("finite instance " + std::to_string(i) +
                                    ": product engine vs graph oracle");
        }
    }

    // --- translations against the lasso oracle -----------------------------
    for (std::uint32_t i = 0; i < cfg.translation_formulas; ++i) {
        const ltl::LtlFormula& phi = parsed[i % parsed.size()];
        Nbwa tab = tableau(phi);
        std::optional<Owfa> det, fg;
        if (ltl::is_det(phi)) det = neg_det_translate(phi);
        if (ltl::is_fg(phi)) fg = fg_translate(phi);
        for (std::uint32_t k = 0; k < cfg.lassos_per_formula; ++k) {
            Word u, v;
            std::uint32_t ul = rng.below(4), vl = 1 + rng.below(3);
            for (std::uint32_t j = 0; j < ul; ++j) u.push_back(acts.symbols()[rng.below(2)]);
            for (std::uint32_t j = 0; j < vl; ++j) v.push_back(acts.symbols()[rng.below(2)]);
            bool expect = ltl::lasso_sat(u, v, phi);
            ++rep.translation_checks;
            if (nbwa_lasso_member(tab, u, v) != expect)
                record_disagreement("tableau vs lasso oracle on '" + ltl::print(phi) + "'");
            if (det && owfa_lasso_member(*det, u, v) != !expect)
                record_disagreement("negation translation vs lasso oracle on '" +
                                    ltl::print(phi) + "'");
            if (fg && owfa_lasso_member(*fg, u, v) != expect)
                record_disagreement("fragment translation vs lasso oracle on '" +
                                    ltl::print(phi) + "'");
        }
    }
    return rep;
}

}  // namespace rmc
