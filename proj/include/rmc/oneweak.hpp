/* oneweak.hpp -- 1-weak Büchi automata with fairness obligations, and the
 * two fragment translations that produce them.
 *
 * A 1-weak automaton's transition graph is a dag with per-state self-loops,
 * so every infinite run stabilizes in one state. A run is accepting when it
 * stabilizes in an accepting state and, for each of that state's fairness
 * letter sets, reads letters from the set infinitely often.
 */

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "rmc/graph.hpp"
#include "rmc/ltl.hpp"
#include "rmc/tableau.hpp"

namespace rmc {

struct Owfa {
    struct Edge {
        State src;
        ltl::LetterSet letters;
        State dst;
    };

    Alphabet actions;
    State num_states = 0;
    std::vector<State> initials;
    std::vector<char> accepting;
    std::vector<ltl::LetterSet> self_loop;               // per state, may be empty
    std::vector<Edge> edges;                             // strictly order-increasing
    std::vector<std::vector<ltl::LetterSet>> fairness;   // per state
    std::vector<std::uint32_t> order;                    // topological witness

    State add_state() {
        accepting.push_back(0);
        self_loop.emplace_back();
        fairness.emplace_back();
        return num_states++;
    }
};

inline OneWeakResult one_weak_check(const Owfa& a) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> g;
    for (const auto& e : a.edges)
        if (e.src != e.dst && !e.letters.empty()) g.emplace_back(e.src, e.dst);
    auto order = graph::topological_index(a.num_states, g);
    if (order) return {true, *order, {}};
    auto cycle = graph::find_cycle(a.num_states, g);
    if (!cycle) throw SoundnessError("one-weak check: cyclic graph without a cycle");
    return {false, {}, *cycle};
}

namespace detail_owfa {

/// Drop states that cannot reach a potentially accepting stabilization state,
/// recompute the topological witness.
inline Owfa cleanup(Owfa a) {
    std::vector<std::vector<State>> succ(a.num_states), pred(a.num_states);
    for (const auto& e : a.edges)
        if (!e.letters.empty()) {
            succ[e.src].push_back(e.dst);
            pred[e.dst].push_back(e.src);
        }
    std::vector<char> fwd(a.num_states, 0), good(a.num_states, 0);
    std::deque<State> q(a.initials.begin(), a.initials.end());
    for (State s : a.initials) fwd[s] = 1;
    while (!q.empty()) {
        State s = q.front();
        q.pop_front();
        for (State d : succ[s])
            if (!fwd[d]) {
                fwd[d] = 1;
                q.push_back(d);
            }
    }
    for (State s = 0; s < a.num_states; ++s)
        if (a.accepting[s] && !a.self_loop[s].empty()) {
            good[s] = 1;
            q.push_back(s);
        }
    while (!q.empty()) {
        State s = q.front();
        q.pop_front();
        for (State p : pred[s])
            if (!good[p]) {
                good[p] = 1;
                q.push_back(p);
            }
    }
    std::vector<State> remap(a.num_states, UINT32_MAX);
    Owfa out;
    out.actions = a.actions;
    for (State s = 0; s < a.num_states; ++s)
        if (fwd[s] && good[s]) remap[s] = out.add_state();
    for (State s = 0; s < a.num_states; ++s) {
        if (remap[s] == UINT32_MAX) continue;
        out.accepting[remap[s]] = a.accepting[s];
        out.self_loop[remap[s]] = a.self_loop[s];
        out.fairness[remap[s]] = a.fairness[s];
    }
    for (State s : a.initials)
        if (remap[s] != UINT32_MAX) out.initials.push_back(remap[s]);
    std::sort(out.initials.begin(), out.initials.end());
    out.initials.erase(std::unique(out.initials.begin(), out.initials.end()), out.initials.end());
    for (const auto& e : a.edges)
        if (remap[e.src] != UINT32_MAX && remap[e.dst] != UINT32_MAX && !e.letters.empty())
            out.edges.push_back({remap[e.src], e.letters, remap[e.dst]});
    OneWeakResult chk = one_weak_check(out);
    if (!chk.one_weak) throw SoundnessError("translation produced a non-1-weak automaton");
    out.order = chk.order;
    return out;
}

// -- negation translation for the deterministic fragment --------------------

struct NegDetBuilder {
    const Alphabet& actions;
    Owfa aut;

    explicit NegDetBuilder(const Alphabet& a) : actions(a) { aut.actions = a; }

    /// First steps of the sub-automaton rooted at `inits`, filtered to
    /// letters in `filter`, re-rooted at the fresh state `from`.
    void merge_first_steps(State from, const std::vector<State>& inits,
                           const ltl::LetterSet& filter) {
        for (State i : inits) {
            ltl::LetterSet loop = ltl::ls_intersect(aut.self_loop[i], filter);
            if (!loop.empty()) aut.edges.push_back({from, loop, i});
        }
        // inter-state first steps
        std::vector<Owfa::Edge> snapshot = aut.edges;
        for (const auto& e : snapshot) {
            for (State i : inits)
                if (e.src == i) {
                    ltl::LetterSet c = ltl::ls_intersect(e.letters, filter);
                    if (!c.empty() && e.dst != from) aut.edges.push_back({from, c, e.dst});
                }
        }
    }

    /// Returns the initial states of the automaton for the negation of f.
    std::vector<State> build(const ltl::FormulaPtr& f) {
        using ltl::Op;
        switch (f->op) {
            case Op::Atom: {
                // ¬p: the first letter falls outside the set
                ltl::LetterSet out = ltl::ls_complement(actions, f->pred);
                State s0 = aut.add_state();
                State acc = aut.add_state();
                aut.accepting[acc] = 1;
                aut.self_loop[acc] = ltl::LetterSet(actions.symbols());
                if (!out.empty()) aut.edges.push_back({s0, out, acc});
                return {s0};
            }
            case Op::Next: {
                std::vector<State> sub = build(f->lhs);
                State s = aut.add_state();
                ltl::LetterSet all(actions.symbols());
                for (State i : sub) aut.edges.push_back({s, all, i});
                return {s};
            }
            case Op::And: {
                std::vector<State> l = build(f->lhs);
                std::vector<State> r = build(f->rhs);
                l.insert(l.end(), r.begin(), r.end());
                return l;
            }
            case Op::Globally:
                return build_weak(ltl::LetterSet(actions.symbols()), f->lhs,
                                  ltl::Formula::atom({}), /*accepting_wait=*/false);
            case Op::SGlobally: {
                std::vector<State> sub =
                    build_weak(ltl::LetterSet(actions.symbols()), f->lhs, ltl::Formula::atom({}),
                               /*accepting_wait=*/false);
                State s = aut.add_state();
                ltl::LetterSet all(actions.symbols());
                for (State i : sub) aut.edges.push_back({s, all, i});
                return {s};
            }
            case Op::Or: {
                if (f->lhs->op == Op::Atom && f->lhs->pred.empty()) return build(f->rhs);
                if (f->rhs->op == Op::Atom && f->rhs->pred.empty()) return build(f->lhs);
                ltl::FormulaPtr l = f->lhs, r = f->rhs;
                auto p = ltl::detail::det_guard_match(actions, l, r);
                if (!p) {
                    std::swap(l, r);
                    p = ltl::detail::det_guard_match(actions, l, r);
                }
                if (!p) throw InputError("formula is outside the deterministic fragment");
                // ¬(L ∨ R): on guard letters the right side is already false,
                // so refute L there, and dually.
                std::vector<State> al = build(l);
                std::vector<State> ar = build(r);
                State s = aut.add_state();
                merge_first_steps(s, al, *p);
                merge_first_steps(s, ar, ltl::ls_complement(actions, *p));
                return {s};
            }
            case Op::Until:
            case Op::WUntil: {
                auto p = ltl::detail::det_guard_match(actions, f->lhs, f->rhs);
                if (!p) throw InputError("formula is outside the deterministic fragment");
                return build_weak(*p, f->lhs, f->rhs, /*accepting_wait=*/f->op == Op::Until);
            }
            default:
                throw InputError("formula is outside the deterministic fragment");
        }
    }

    /// Shared body of the until/weak-until/globally clauses: wait on guard
    /// letters, exit on a guard letter refuting the left side or on a
    /// non-guard letter refuting the right side.
    std::vector<State> build_weak(const ltl::LetterSet& guard, const ltl::FormulaPtr& left,
                                  const ltl::FormulaPtr& right, bool accepting_wait) {
        std::vector<State> al = build(left);
        std::vector<State> ar = build(right);
        State s = aut.add_state();
        aut.self_loop[s] = guard;
        aut.accepting[s] = accepting_wait;
        merge_first_steps(s, al, guard);
        merge_first_steps(s, ar, ltl::ls_complement(actions, guard));
        return {s};
    }
};

}  // namespace detail_owfa

/// 1-weak automaton for the negation of a deterministic-fragment formula.
/// No fairness obligations; at most 3·|φ|+2 states.
inline Owfa neg_det_translate(const ltl::LtlFormula& f) {
    if (!ltl::is_det(f)) throw InputError("formula is outside the deterministic fragment");
    detail_owfa::NegDetBuilder b(f.actions);
    b.aut.initials = b.build(f.root);
    return detail_owfa::cleanup(std::move(b.aut));
}

// ---------------------------------------------------------------------------
// Strict-future fragment translation

namespace detail_owfa {

struct FgContext {
    Alphabet actions;
    std::vector<ltl::FormulaPtr> tatoms;           // Fs/Gs-rooted subformulas
    std::vector<char> is_future;                   // per temporal atom
    using Disjunct = std::pair<ltl::LetterSet, std::uint32_t>;
    std::map<const ltl::Formula*, std::vector<Disjunct>> dnf_memo;

    int atom_id(const ltl::FormulaPtr& f) {
        for (std::size_t i = 0; i < tatoms.size(); ++i)
            if (ltl::equal(tatoms[i], f)) return static_cast<int>(i);
        return -1;
    }

    void collect(const ltl::FormulaPtr& f) {
        using ltl::Op;
        if (f->op == Op::SFuture || f->op == Op::SGlobally) {
            if (atom_id(f) < 0) {
                if (tatoms.size() >= 31) throw InputError("formula too large for the translation");
                tatoms.push_back(f);
                is_future.push_back(f->op == Op::SFuture);
            }
            collect(f->lhs);
            return;
        }
        if (f->lhs) collect(f->lhs);
        if (f->rhs) collect(f->rhs);
    }

    /// Disjunctive view: f holds at a position iff for some disjunct (P, T)
    /// the letter lies in P and every temporal atom in T holds there.
    const std::vector<Disjunct>& dnf(const ltl::FormulaPtr& f) {
        auto it = dnf_memo.find(f.get());
        if (it != dnf_memo.end()) return it->second;
        using ltl::Op;
        std::vector<Disjunct> out;
        switch (f->op) {
            case Op::Atom:
                if (!f->pred.empty()) out.push_back({f->pred, 0});
                break;
            case Op::SFuture:
            case Op::SGlobally:
                out.push_back({ltl::LetterSet(actions.symbols()),
                               std::uint32_t(1) << atom_id(f)});
                break;
            case Op::Or: {
                auto l = dnf(f->lhs), r = dnf(f->rhs);
                out = l;
                out.insert(out.end(), r.begin(), r.end());
                break;
            }
            case Op::And: {
                auto l = dnf(f->lhs), r = dnf(f->rhs);
                for (const auto& [pl, tl] : l)
                    for (const auto& [pr, tr] : r) {
                        ltl::LetterSet p = ltl::ls_intersect(pl, pr);
                        if (!p.empty()) out.push_back({p, tl | tr});
                    }
                break;
            }
            default:
                throw SoundnessError("translation: formula left the strict fragment");
        }
        return dnf_memo.emplace(f.get(), std::move(out)).first->second;
    }

    /// The letter set on which f holds when exactly the atoms in `claims`
    /// may be assumed true (unclaimed atoms count as false).
    ltl::LetterSet eval_under(const ltl::FormulaPtr& f, std::uint32_t claims) {
        ltl::LetterSet out;
        for (const auto& [p, t] : dnf(f))
            if ((t & ~claims) == 0) out = ltl::ls_union(out, p);
        return out;
    }
};

}  // namespace detail_owfa

/// 1-weak automaton with fairness for a strict-future fragment formula;
/// L(result) is exactly the set of words satisfying it.
///
/// States carry the set of temporal atoms currently claimed true plus the
/// letter constraint owed to the previous transition's assertions. Claims on
/// strict-future atoms may only be dropped (discharging the body one step
/// later), claims on strict-globally atoms may only be added; both give the
/// dag shape. Claims that persist into a self-looping state bottom out as
/// letter sets: the loop constraint for globally-claims, one fairness set per
/// held future-claim.
inline Owfa fg_translate(const ltl::LtlFormula& formula) {
    if (!ltl::is_fg(formula)) throw InputError("formula is outside the strict-future fragment");
    ltl::LtlFormula n = ltl::nnf(formula);
    detail_owfa::FgContext ctx{n.actions, {}, {}, {}};
    ctx.collect(n.root);
    const std::uint32_t n_atoms = static_cast<std::uint32_t>(ctx.tatoms.size());
    std::uint32_t future_mask = 0, glob_mask = 0;
    for (std::uint32_t i = 0; i < n_atoms; ++i)
        (ctx.is_future[i] ? future_mask : glob_mask) |= std::uint32_t(1) << i;

    auto body = [&](std::uint32_t i) { return ctx.tatoms[i]->lhs; };

    // self-loop constraint of a claim set
    auto self_pred = [&](std::uint32_t claims) {
        ltl::LetterSet d(n.actions.symbols());
        for (std::uint32_t i = 0; i < n_atoms; ++i)
            if ((claims >> i & 1) && !ctx.is_future[i])
                d = ltl::ls_intersect(d, ctx.eval_under(body(i), claims));
        return d;
    };
    // letter constraint owed at the target position of a switch
    auto switch_pred = [&](std::uint32_t from, std::uint32_t to) {
        ltl::LetterSet d(n.actions.symbols());
        for (std::uint32_t i = 0; i < n_atoms; ++i) {
            bool held_glob = (from >> i & 1) && !ctx.is_future[i];
            bool dropped_fut = (from >> i & 1) && !(to >> i & 1) && ctx.is_future[i];
            if (held_glob || dropped_fut) d = ltl::ls_intersect(d, ctx.eval_under(body(i), to));
        }
        return d;
    };

    Owfa aut;
    aut.actions = n.actions;
    std::map<std::pair<std::uint32_t, ltl::LetterSet>, State> ids;
    std::deque<std::pair<std::uint32_t, ltl::LetterSet>> todo;
    auto get = [&](std::uint32_t claims, const ltl::LetterSet& pend) {
        auto key = std::make_pair(claims, pend);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        State s = aut.add_state();
        ids.emplace(key, s);
        todo.emplace_back(claims, pend);
        return s;
    };

    for (const auto& [p, t] : ctx.dnf(n.root)) {
        std::uint32_t extra = future_mask & ~t;
        // every subset of additional future-claims may be taken up front
        for (std::uint32_t sub = extra;; sub = (sub - 1) & extra) {
            aut.initials.push_back(get(t | sub, p));
            if (sub == 0) break;
        }
    }

    while (!todo.empty()) {
        auto [claims, pend] = todo.front();
        todo.pop_front();
        State src = ids[{claims, pend}];
        ltl::LetterSet dself = self_pred(claims);
        if (pend == dself && !pend.empty()) {
            aut.self_loop[src] = pend;
            aut.accepting[src] = 1;
            for (std::uint32_t i = 0; i < n_atoms; ++i)
                if ((claims >> i & 1) && ctx.is_future[i])
                    aut.fairness[src].push_back(ctx.eval_under(body(i), claims));
            // an unmeetable obligation makes the stabilization worthless
            for (const auto& fs : aut.fairness[src])
                if (fs.empty()) {
                    aut.accepting[src] = 0;
                    aut.fairness[src].clear();
                    break;
                }
        } else if (!pend.empty() && !dself.empty()) {
            aut.edges.push_back({src, pend, get(claims, dself)});
        }
        if (pend.empty()) continue;
        // switches: drop some held future-claims, add some globally-claims
        std::uint32_t droppable = claims & future_mask;
        std::uint32_t addable = glob_mask & ~claims;
        for (std::uint32_t drop = droppable;; drop = (drop - 1) & droppable) {
            for (std::uint32_t add = addable;; add = (add - 1) & addable) {
                std::uint32_t next = (claims & ~drop) | add;
                if (next != claims) {
                    ltl::LetterSet d2 = switch_pred(claims, next);
                    if (!d2.empty()) aut.edges.push_back({src, pend, get(next, d2)});
                }
                if (add == 0) break;
            }
            if (drop == 0) break;
        }
    }
    std::sort(aut.initials.begin(), aut.initials.end());
    aut.initials.erase(std::unique(aut.initials.begin(), aut.initials.end()), aut.initials.end());
    return detail_owfa::cleanup(std::move(aut));
}

/// Does u·v^ω belong to L(a)? Runs stabilize, so acceptance reduces to
/// reaching a state whose self-loop covers the period and whose fairness
/// sets all meet it.
inline bool owfa_lasso_member(const Owfa& a, const Word& u, const Word& v) {
    if (v.empty()) throw InputError("lasso period must be non-empty");
    std::vector<Symbol> letters(u);
    letters.insert(letters.end(), v.begin(), v.end());
    const std::size_t P = letters.size();
    auto succ = [&](std::size_t i) { return i + 1 < P ? i + 1 : u.size(); };

    ltl::LetterSet period_letters;
    for (Symbol s : v) period_letters = ltl::ls_union(period_letters, {s});

    std::vector<std::vector<std::pair<const ltl::LetterSet*, State>>> adj(a.num_states);
    for (State q = 0; q < a.num_states; ++q)
        if (!a.self_loop[q].empty()) adj[q].emplace_back(&a.self_loop[q], q);
    for (const auto& e : a.edges) adj[e.src].emplace_back(&e.letters, e.dst);

    std::vector<char> reach(a.num_states * P, 0);
    std::deque<std::pair<State, std::size_t>> q;
    for (State s : a.initials) {
        if (!reach[s * P]) {
            reach[s * P] = 1;
            q.emplace_back(s, 0);
        }
    }
    auto stays = [&](State s) {
        if (!a.accepting[s]) return false;
        for (Symbol c : period_letters)
            if (!ltl::ls_contains(a.self_loop[s], c)) return false;
        for (const auto& fs : a.fairness[s])
            if (ltl::ls_intersect(fs, period_letters).empty()) return false;
        return true;
    };
    while (!q.empty()) {
        auto [s, i] = q.front();
        q.pop_front();
        if (i >= u.size() && stays(s)) return true;
        for (const auto& [set, dst] : adj[s]) {
            if (!ltl::ls_contains(*set, letters[i])) continue;
            std::size_t j = succ(i);
            if (!reach[dst * P + j]) {
                reach[dst * P + j] = 1;
                q.emplace_back(dst, j);
            }
        }
    }
    return false;
}

/// View a 1-weak Büchi automaton (no fairness) as an Owfa.
inline Owfa owfa_from_nbwa(const Nbwa& a) {
    OneWeakResult chk = one_weak_check(a);
    if (!chk.one_weak) throw InputError("automaton is not 1-weak");
    Owfa out;
    out.actions = a.actions;
    for (State s = 0; s < a.num_states; ++s) out.add_state();
    out.initials = a.initials;
    for (State s = 0; s < a.num_states; ++s) out.accepting[s] = a.accepting[s];
    std::map<std::pair<State, State>, ltl::LetterSet> grouped;
    for (const auto& t : a.transitions) {
        if (t.src == t.dst)
            out.self_loop[t.src] = ltl::ls_union(out.self_loop[t.src], {t.sym});
        else
            grouped[{t.src, t.dst}] = ltl::ls_union(grouped[{t.src, t.dst}], {t.sym});
    }
    for (const auto& [k, v] : grouped) out.edges.push_back({k.first, v, k.second});
    out.order = chk.order;
    return out;
}

}  // namespace rmc
