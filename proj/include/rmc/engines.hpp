/* engines.hpp -- the model checking pipelines.
 *
 * Three engines answer (system, v0) |= phi for different inputs:
 *  - check_ltl_product: product of the negation's Büchi automaton with the
 *    system, closure from the provider, recurrent reachability of the
 *    accepting-control configurations.
 *  - check_path_decomp: for 1-weak violation automata, a walk over the
 *    automaton dag; each stabilization state contributes the infinite-chain
 *    set of a fair chain relation built from subset closures, pulled back
 *    through the dag edges by pre-images.
 *  - check_pds_bem: exact engine for pushdown systems; decides acceptance of
 *    the rule-level product through head cycles and backward saturation.
 *
 * Unknown is a first-class verdict: bounds that fail to converge are
 * reported, never truncated into a guess. Every Violated verdict carries a
 * certificate that is validated before it is returned.
 */

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rmc/closures.hpp"
#include "rmc/oneweak.hpp"
#include "rmc/pds.hpp"
#include "rmc/presentation.hpp"
#include "rmc/recurrence.hpp"
#include "rmc/tableau.hpp"

namespace rmc {

enum class Verdict { Holds, Violated, Unknown };

inline const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Violated: return "violated";
        default: return "unknown";
    }
}

struct EngineConfig {
    // engines trade fixpoint depth for responsiveness; unconverged bounds
    // surface as Unknown either way
    RecurrenceConfig rec{12, 3, /*decreasing_shortcut=*/true, /*max_gfp_states=*/600};
    bool want_witness = true;
    bool want_sets = false;  // emit the violating-set automata
};

struct EngineWitness {
    std::vector<Word> chain;  // consecutive configurations, pairwise validated
    std::optional<std::pair<Word, Word>> lasso;  // action words u, v
    std::string description;
};

struct CheckResult {
    Verdict verdict = Verdict::Unknown;
    std::string engine;
    Word init;
    double provider_seconds = 0;
    BoundStatus upper_status = BoundStatus::Converged;
    std::optional<Nfa> violating_lower, violating_upper;  // over system states
    std::optional<EngineWitness> witness;
    bool certificate_validated = false;
    std::string note;
};

/// The finite control system underlying a Büchi automaton.
struct ControlledSystem {
    FiniteSystem fs;
    std::vector<State> finals;
};

inline ControlledSystem finite_system_of(const Nbwa& b) {
    ControlledSystem out;
    out.fs.num_states = b.num_states;
    out.fs.initials = b.initials;
    for (const auto& t : b.transitions) out.fs.steps.push_back({t.src, t.sym, t.dst});
    // A run meets a control infinitely often only if the control sits on a
    // cycle, so transient accepting states can be dropped from the target
    // set without changing the recurrence set.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<char> self_loop(b.num_states, 0);
    for (const auto& t : b.transitions) {
        edges.emplace_back(t.src, t.dst);
        if (t.src == t.dst) self_loop[t.src] = 1;
    }
    graph::SccResult comps = graph::scc(b.num_states, edges);
    std::vector<std::uint32_t> size(comps.count, 0);
    for (State s = 0; s < b.num_states; ++s) ++size[comps.comp[s]];
    for (State s = 0; s < b.num_states; ++s)
        if (b.accepting[s] && (size[comps.comp[s]] >= 2 || self_loop[s])) out.finals.push_back(s);
    return out;
}

inline ControlledSystem finite_system_of(const Owfa& a) {
    ControlledSystem out;
    out.fs.num_states = a.num_states;
    out.fs.initials = a.initials;
    for (State s = 0; s < a.num_states; ++s)
        for (Symbol c : a.self_loop[s]) out.fs.steps.push_back({s, c, s});
    for (const auto& e : a.edges)
        for (Symbol c : e.letters) out.fs.steps.push_back({e.src, c, e.dst});
    // only self-looping states can host a stabilization
    for (State s = 0; s < a.num_states; ++s)
        if (a.accepting[s] && !a.self_loop[s].empty()) out.finals.push_back(s);
    out.fs.one_weak_order = a.order;
    return out;
}

inline void require_in_domain(const AutomaticPresentation& p, const Word& v0) {
    if (!member(p.domain, v0))
        throw InputError("initial state '" + word_to_string(v0) + "' is outside the domain");
}

/// Vacuity: a state with no one-step successor realizes no infinite word.
inline bool is_deadlocked(const AutomaticPresentation& p, const Word& v0) {
    for (Symbol a : p.actions) {
        Nfa post = post_image(p.relation(a), singleton_nfa(p.domain.alphabet, v0));
        if (!is_empty(post).empty) return false;
    }
    return true;
}

/// Violation check through the Büchi product: build the product system with
/// the negation automaton, ask the provider for its closure, and compute the
/// recurrent-reachability set of the accepting-control configurations.
inline CheckResult check_ltl_product(ClosureProvider& provider, const ltl::LtlFormula& phi,
                                     const Word& v0, const EngineConfig& cfg = {}) {
    CheckResult res;
    res.engine = "product";
    res.init = v0;
    if (!provider.capabilities().finite_product)
        throw InputError("engine 'product' needs the finite-product capability");
    const AutomaticPresentation& pres = provider.presentation();
    require_in_domain(pres, v0);

    if (is_deadlocked(pres, v0)) {
        res.verdict = Verdict::Holds;
        res.note = "vacuous: the initial state has no successors";
        res.provider_seconds = provider.seconds();
        return res;
    }

    Nbwa neg = tableau(ltl::negated(phi));
    if (neg.num_states == 0) {
        res.verdict = Verdict::Holds;
        res.note = "the negated formula has no models";
        res.provider_seconds = provider.seconds();
        return res;
    }
    ControlledSystem ctl = finite_system_of(neg);
    SystemProduct prod = provider.product(ctl.fs);

    const ClosureResult& closure = prod.provider->closure(prod.encoding.pres.actions.symbols());
    res.provider_seconds = provider.seconds() + prod.provider->seconds();
    if (closure.status == ClosureStatus::Diverged) {
        res.verdict = Verdict::Unknown;
        res.upper_status = BoundStatus::Bounded;
        res.note = "provider closure diverged on the product system";
        return res;
    }

    Nfa x = prod.encoding.states_with_control(ctl.finals, pres.domain);
    RecurrenceResult rr = reach_inf(closure.relation, x, cfg.rec);
    res.upper_status = rr.status;

    bool any_lower = false, all_out_upper = true;
    Word hit;
    for (State f0 : ctl.fs.initials) {
        Word enc = prod.encoding.encode(f0, v0);
        if (member(rr.lower, enc)) {
            any_lower = true;
            hit = enc;
        }
        if (member(rr.upper, enc)) all_out_upper = false;
    }
    if (cfg.want_sets) {
        std::vector<Symbol> init_controls;
        for (State f0 : ctl.fs.initials) init_controls.push_back(prod.encoding.control_syms[f0]);
        auto strip = [&](const Nfa& set) {
            Nfa restricted = intersect(set, prod.encoding.states_with_control(
                                                ctl.fs.initials, pres.domain));
            // drop the first (control) letter
            Nfa out(pres.domain.alphabet);
            State ini = out.add_state();
            out.add_initial(ini);
            State off = out.num_states;
            out.num_states += restricted.num_states;
            for (State s : restricted.finals) out.add_final(off + s);
            for (const auto& t : restricted.transitions)
                if (pres.domain.alphabet.contains(t.sym))
                    out.add_transition(off + t.src, t.sym, off + t.dst);
            Adjacency adj = Adjacency::of(restricted);
            for (Symbol c : init_controls)
                for (State i : restricted.initials) {
                    auto [lo, hi] = adj.range(i, c);
                    for (std::size_t k = lo; k < hi; ++k) {
                        // splice: everything after the control letter
                        State tgt = adj.out[i][k].second;
                        for (const auto& t : restricted.transitions)
                            if (t.src == tgt && pres.domain.alphabet.contains(t.sym))
                                out.add_transition(ini, t.sym, off + t.dst);
                        if (restricted.is_final(tgt)) out.add_final(ini);
                    }
                }
            out.finish();
            return reduce(out);
        };
        res.violating_lower = strip(rr.lower);
        res.violating_upper = strip(rr.upper);
    }

    if (any_lower) {
        res.verdict = Verdict::Violated;
        if (cfg.want_witness) {
            auto wit = reach_inf_witness(closure.relation, x, hit, cfg.rec);
            if (!wit) throw SoundnessError("certified member without a reconstructible witness");
            EngineWitness ew;
            ew.chain = expand_witness(closure.relation, *wit, 10);
            ew.description = "pump chain over the product closure";
            res.witness = std::move(ew);
            res.certificate_validated = true;
        }
    } else if (all_out_upper && rr.status == BoundStatus::Converged) {
        res.verdict = Verdict::Holds;
    } else {
        res.verdict = Verdict::Unknown;
        res.note = rr.status == BoundStatus::Converged
                       ? "initial state sits between the certified bounds"
                       : "upper bound did not converge";
    }
    return res;
}

/// The product route for a 1-weak violation automaton without fairness.
inline CheckResult check_ltl_product_oneweak(ClosureProvider& provider, const Owfa& viol,
                                             const Word& v0, const EngineConfig& cfg = {}) {
    if (!provider.capabilities().one_weak_product)
        throw InputError("engine 'product' needs the one-weak-product capability");
    for (const auto& fs : viol.fairness)
        if (!fs.empty())
            throw InputError("the product route cannot track fairness obligations");
    CheckResult res;
    res.engine = "product-oneweak";
    res.init = v0;
    const AutomaticPresentation& pres = provider.presentation();
    require_in_domain(pres, v0);
    if (is_deadlocked(pres, v0)) {
        res.verdict = Verdict::Holds;
        res.note = "vacuous: the initial state has no successors";
        return res;
    }
    if (viol.num_states == 0) {
        res.verdict = Verdict::Holds;
        res.note = "the violation automaton is empty";
        return res;
    }
    ControlledSystem ctl = finite_system_of(viol);
    SystemProduct prod = provider.product(ctl.fs);
    const ClosureResult& closure = prod.provider->closure(prod.encoding.pres.actions.symbols());
    res.provider_seconds = provider.seconds() + prod.provider->seconds();
    if (closure.status == ClosureStatus::Diverged) {
        res.verdict = Verdict::Unknown;
        res.upper_status = BoundStatus::Bounded;
        res.note = "provider closure diverged on the product system";
        return res;
    }
    Nfa x = prod.encoding.states_with_control(ctl.finals, pres.domain);
    RecurrenceResult rr = reach_inf(closure.relation, x, cfg.rec);
    res.upper_status = rr.status;
    bool any_lower = false, all_out_upper = true;
    Word hit;
    for (State f0 : ctl.fs.initials) {
        Word enc = prod.encoding.encode(f0, v0);
        if (member(rr.lower, enc)) {
            any_lower = true;
            hit = enc;
        }
        if (member(rr.upper, enc)) all_out_upper = false;
    }
    if (any_lower) {
        res.verdict = Verdict::Violated;
        if (cfg.want_witness) {
            auto wit = reach_inf_witness(closure.relation, x, hit, cfg.rec);
            if (!wit) throw SoundnessError("certified member without a reconstructible witness");
            EngineWitness ew;
            ew.chain = expand_witness(closure.relation, *wit, 10);
            ew.description = "pump chain over the product closure";
            res.witness = std::move(ew);
            res.certificate_validated = true;
        }
    } else if (all_out_upper && rr.status == BoundStatus::Converged) {
        res.verdict = Verdict::Holds;
    } else {
        res.verdict = Verdict::Unknown;
    }
    return res;
}

struct FairChainResult {
    bool available = false;  // false when a subset closure diverged
    Transducer relation;     // empty relation when no fair path can exist
};

/// A transitive relation whose infinite chains are exactly the infinite
/// paths using letters from L that hit every fairness set infinitely often:
/// star blocks of the L-closure around one mandatory step per fairness set.
inline FairChainResult fair_chain_relation(ClosureProvider& provider, const ltl::LetterSet& loop,
                                           const std::vector<ltl::LetterSet>& fairness) {
    if (!provider.capabilities().subset_closure)
        throw InputError("fair chain relations need the subset-closure capability");
    const AutomaticPresentation& pres = provider.presentation();
    FairChainResult out;
    if (loop.empty()) {
        out.available = true;
        out.relation = empty_relation(pres.domain.alphabet);
        return out;
    }
    std::vector<ltl::LetterSet> steps;
    for (const auto& f : fairness) {
        ltl::LetterSet inter = ltl::ls_intersect(f, loop);
        if (inter.empty()) {  // no path can satisfy this obligation
            out.available = true;
            out.relation = empty_relation(pres.domain.alphabet);
            return out;
        }
        steps.push_back(inter);
    }
    const ClosureResult& star_core = provider.closure(loop);
    if (star_core.status == ClosureStatus::Diverged) return out;
    if (steps.empty()) {
        out.available = true;
        out.relation = star_core.relation;
        return out;
    }
    Transducer star = rel_union(star_core.relation, identity_on(pres.domain));
    Transducer g = star;
    for (const auto& s : steps) {
        g = compose(g, union_step(pres, s));
        g = compose(g, star);
    }
    g.base = reduce(g.base);
    out.available = true;
    out.relation = std::move(g);
    return out;
}

/// Bounds of the violating set per automaton state.
namespace detail_eng {

struct YSet {
    Nfa lower;
    std::optional<Nfa> upper;  // no value: unbounded (a closure diverged)
    bool converged = true;
};

}  // namespace detail_eng

/// Path-decomposition check of a 1-weak violation automaton with fairness:
/// suffix sets roll backward over the automaton dag, memoized per state.
inline CheckResult check_path_decomp(ClosureProvider& provider, const Owfa& viol, const Word& v0,
                                     const EngineConfig& cfg = {}) {
    CheckResult res;
    res.engine = "pathdecomp";
    res.init = v0;
    if (!provider.capabilities().subset_closure)
        throw InputError("engine 'pathdecomp' needs the subset-closure capability");
    OneWeakResult chk = one_weak_check(viol);
    if (!chk.one_weak) throw InputError("engine 'pathdecomp' needs a 1-weak automaton");
    const AutomaticPresentation& pres = provider.presentation();
    require_in_domain(pres, v0);
    if (is_deadlocked(pres, v0)) {
        res.verdict = Verdict::Holds;
        res.note = "vacuous: the initial state has no successors";
        res.provider_seconds = provider.seconds();
        return res;
    }
    if (viol.num_states == 0) {
        res.verdict = Verdict::Holds;
        res.note = "the violation automaton is empty";
        res.provider_seconds = provider.seconds();
        return res;
    }

    const Alphabet& sigma = pres.domain.alphabet;
    // process states downward along the topological order (suffix first)
    std::vector<State> order(viol.num_states);
    for (State s = 0; s < viol.num_states; ++s) order[chk.order[s]] = s;
    std::vector<detail_eng::YSet> y(viol.num_states);

    // pump data for witness extraction
    std::map<State, Transducer> chain_rel;

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        State p = *it;
        detail_eng::YSet set;
        set.lower = empty_nfa(sigma);
        set.upper = empty_nfa(sigma);
        if (viol.accepting[p] && !viol.self_loop[p].empty()) {
            FairChainResult fcr = fair_chain_relation(provider, viol.self_loop[p], viol.fairness[p]);
            if (!fcr.available) {
                set.upper = std::nullopt;
                set.converged = false;
            } else {
                RecurrenceResult rr = infinite_chain(fcr.relation, cfg.rec);
                set.lower = unite(set.lower, rr.lower);
                if (set.upper) set.upper = unite(*set.upper, rr.upper);
                if (rr.status != BoundStatus::Converged) set.converged = false;
                chain_rel.emplace(p, fcr.relation);
            }
        }
        for (const auto& e : viol.edges) {
            if (e.src != p) continue;
            const detail_eng::YSet& next = y[e.dst];
            Transducer step = union_step(pres, e.letters);
            Nfa pre_low = pre_image(step, next.lower);
            std::optional<Nfa> pre_up;
            if (next.upper) pre_up = pre_image(step, *next.upper);
            if (!next.converged) set.converged = false;
            if (viol.self_loop[p].empty()) {
                set.lower = unite(set.lower, pre_low);
                if (set.upper && pre_up)
                    set.upper = unite(*set.upper, *pre_up);
                else if (!pre_up)
                    set.upper = std::nullopt;
            } else {
                const ClosureResult& star = provider.closure(viol.self_loop[p]);
                if (star.status == ClosureStatus::Diverged) {
                    // the identity part still gives a sound lower bound
                    set.lower = unite(set.lower, pre_low);
                    set.upper = std::nullopt;
                    set.converged = false;
                } else {
                    set.lower = unite(set.lower, unite(pre_low, pre_image(star.relation, pre_low)));
                    if (set.upper && pre_up)
                        set.upper =
                            unite(*set.upper, unite(*pre_up, pre_image(star.relation, *pre_up)));
                    else if (!pre_up)
                        set.upper = std::nullopt;
                }
            }
        }
        set.lower = compact(set.lower);
        if (set.upper) set.upper = compact(*set.upper);
        y[p] = std::move(set);
    }

    res.provider_seconds = provider.seconds();
    bool any_lower = false, all_out = true, all_conv = true;
    State hit = 0;
    for (State p0 : viol.initials) {
        if (member(y[p0].lower, v0)) {
            any_lower = true;
            hit = p0;
        }
        if (!y[p0].upper || member(*y[p0].upper, v0)) all_out = false;
        if (!y[p0].converged) all_conv = false;
    }
    res.upper_status = all_conv ? BoundStatus::Converged : BoundStatus::Bounded;

    if (any_lower) {
        res.verdict = Verdict::Violated;
        if (cfg.want_witness) {
            // walk the dag forward, materializing intermediate states
            EngineWitness ew;
            ew.description = "system path into a fair pump";
            Word cur = v0;
            State p = hit;
            std::set<State> guard;
            for (;;) {
                if (!guard.insert(p).second)
                    throw SoundnessError("violation trace revisits an automaton state");
                auto own = chain_rel.find(p);
                if (own != chain_rel.end() && member(infinite_chain(own->second, cfg.rec).lower, cur)) {
                    auto wit = chain_witness(own->second, cur, cfg.rec);
                    if (!wit) throw SoundnessError("pump member without a witness");
                    std::vector<Word> chain = expand_witness(own->second, *wit, 10);
                    ew.chain.insert(ew.chain.end(), chain.begin(), chain.end());
                    break;
                }
                // find the edge whose pulled-back set explains cur
                bool advanced = false;
                for (const auto& e : viol.edges) {
                    if (e.src != p) continue;
                    Transducer step = union_step(pres, e.letters);
                    Nfa pre1 = pre_image(step, y[e.dst].lower);
                    Word mid = cur;
                    bool ok = member(pre1, cur);
                    if (!ok && !viol.self_loop[p].empty()) {
                        const ClosureResult& star = provider.closure(viol.self_loop[p]);
                        if (star.status == ClosureStatus::Converged) {
                            Nfa reach = intersect(
                                post_image(star.relation, singleton_nfa(sigma, cur)), pre1);
                            auto w = is_empty(reach);
                            if (!w.empty) {
                                mid = *w.witness;
                                ok = true;
                            }
                        }
                    }
                    if (!ok) continue;
                    if (mid != cur) {
                        ew.chain.push_back(cur);
                        // loop-steps: cur ->* mid within the self-loop letters
                    }
                    Nfa nxt = intersect(post_image(step, singleton_nfa(sigma, mid)), y[e.dst].lower);
                    auto w2 = is_empty(nxt);
                    if (w2.empty) continue;
                    ew.chain.push_back(mid);
                    cur = *w2.witness;
                    p = e.dst;
                    advanced = true;
                    break;
                }
                if (!advanced) throw SoundnessError("violation trace reconstruction got stuck");
            }
            res.witness = std::move(ew);
            res.certificate_validated = true;
        }
    } else if (all_out && all_conv) {
        res.verdict = Verdict::Holds;
    } else {
        res.verdict = Verdict::Unknown;
        res.note = all_conv ? "initial state sits between the certified bounds"
                            : "a bound did not converge";
    }
    return res;
}

}  // namespace rmc

#include "rmc/engines_pdsbem.hpp"

namespace rmc {

/// Dispatch per the default policy: the deterministic fragment goes through
/// its negation translation, the strict fragment through the fairness
/// translation, full LTL through the dedicated engine on pushdown input or
/// the product pipeline elsewhere.
inline CheckResult auto_check(ClosureProvider& provider, const Pds* pds,
                              const ltl::LtlFormula& phi, const Word& v0,
                              const EngineConfig& cfg = {}) {
    ltl::Fragment frag = ltl::classify(phi);
    Capabilities caps = provider.capabilities();
    if (frag == ltl::Fragment::Det && caps.subset_closure) {
        CheckResult r = check_path_decomp(provider, neg_det_translate(phi), v0, cfg);
        r.engine = "pathdecomp(det)";
        return r;
    }
    if (frag == ltl::Fragment::Fg && caps.subset_closure) {
        CheckResult r = check_path_decomp(provider, fg_translate(ltl::negated(phi)), v0, cfg);
        r.engine = "pathdecomp(fg)";
        return r;
    }
    if (pds) return check_pds_bem(*pds, phi, v0, cfg);
    Nbwa neg = tableau(ltl::negated(phi));
    OneWeakResult chk = one_weak_check(neg);
    if (chk.one_weak && caps.subset_closure)
        return check_path_decomp(provider, owfa_from_nbwa(neg), v0, cfg);
    if (caps.finite_product) return check_ltl_product(provider, phi, v0, cfg);
    throw InputError("no engine is applicable: the provider lacks the needed capabilities");
}

}  // namespace rmc
