/* tableau.hpp -- Büchi automata over action alphabets and the LTL translation.
 *
 * The translation expands closure sets of the negation-normal core (atoms,
 * and, or, next, until, release): a state is a saturated consistent set, a
 * transition reads any letter satisfying all asserted atoms and moves to an
 * expansion of the deferred obligations. Until-obligations are tracked by a
 * round-robin counter, which degeneralizes the product acceptance.
 */

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rmc/graph.hpp"
#include "rmc/ltl.hpp"
#include "rmc/nfa.hpp"
#include "rmc/symbols.hpp"

namespace rmc {

/// Nondeterministic Büchi automaton over an action alphabet.
struct Nbwa {
    Alphabet actions;
    State num_states = 0;
    std::vector<State> initials;
    std::vector<char> accepting;
    std::vector<Transition> transitions;

    State add_state() {
        accepting.push_back(0);
        return num_states++;
    }
};

namespace buchi {

/// Drop states that cannot lie on an accepting run (unreachable or unable to
/// reach an accepting cycle).
inline Nbwa trim(const Nbwa& a) {
    std::vector<char> reach(a.num_states, 0);
    {
        std::vector<std::vector<State>> succ(a.num_states);
        for (const auto& t : a.transitions) succ[t.src].push_back(t.dst);
        std::deque<State> q(a.initials.begin(), a.initials.end());
        for (State s : a.initials) reach[s] = 1;
        while (!q.empty()) {
            State s = q.front();
            q.pop_front();
            for (State d : succ[s])
                if (!reach[d]) {
                    reach[d] = 1;
                    q.push_back(d);
                }
        }
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::vector<char> self_loop(a.num_states, 0);
    for (const auto& t : a.transitions) {
        edges.emplace_back(t.src, t.dst);
        if (t.src == t.dst) self_loop[t.src] = 1;
    }
    graph::SccResult comps = graph::scc(a.num_states, edges);
    std::vector<std::uint32_t> comp_size(comps.count, 0);
    std::vector<char> comp_accepting(comps.count, 0), comp_loop(comps.count, 0);
    for (State s = 0; s < a.num_states; ++s) {
        ++comp_size[comps.comp[s]];
        if (a.accepting[s]) comp_accepting[comps.comp[s]] = 1;
        if (self_loop[s]) comp_loop[comps.comp[s]] = 1;
    }
    // good components host an accepting cycle
    std::vector<char> good(comps.count, 0);
    for (std::uint32_t c = 0; c < comps.count; ++c)
        good[c] = comp_accepting[c] && (comp_size[c] >= 2 || comp_loop[c]);
    // states that can reach a good component
    std::vector<char> useful(a.num_states, 0);
    {
        std::vector<std::vector<State>> pred(a.num_states);
        for (const auto& t : a.transitions) pred[t.dst].push_back(t.src);
        std::deque<State> q;
        for (State s = 0; s < a.num_states; ++s)
            if (good[comps.comp[s]]) {
                useful[s] = 1;
                q.push_back(s);
            }
        while (!q.empty()) {
            State s = q.front();
            q.pop_front();
            for (State p : pred[s])
                if (!useful[p]) {
                    useful[p] = 1;
                    q.push_back(p);
                }
        }
    }
    std::vector<State> remap(a.num_states, UINT32_MAX);
    Nbwa out;
    out.actions = a.actions;
    for (State s = 0; s < a.num_states; ++s)
        if (reach[s] && useful[s]) remap[s] = out.add_state();
    for (State s = 0; s < a.num_states; ++s)
        if (remap[s] != UINT32_MAX) out.accepting[remap[s]] = a.accepting[s];
    for (State s : a.initials)
        if (remap[s] != UINT32_MAX) out.initials.push_back(remap[s]);
    for (const auto& t : a.transitions)
        if (remap[t.src] != UINT32_MAX && remap[t.dst] != UINT32_MAX)
            out.transitions.push_back({remap[t.src], t.sym, remap[t.dst]});
    std::sort(out.initials.begin(), out.initials.end());
    out.initials.erase(std::unique(out.initials.begin(), out.initials.end()), out.initials.end());
    std::sort(out.transitions.begin(), out.transitions.end());
    out.transitions.erase(std::unique(out.transitions.begin(), out.transitions.end()),
                          out.transitions.end());
    return out;
}

}  // namespace buchi

namespace detail_tableau {

enum class CoreOp { Atom, And, Or, Next, Until, Release };

struct CoreNode {
    CoreOp op;
    ltl::LetterSet pred;
    int lhs = -1, rhs = -1;
    bool operator<(const CoreNode& o) const {
        return std::tie(op, pred, lhs, rhs) < std::tie(o.op, o.pred, o.lhs, o.rhs);
    }
};

struct CorePool {
    std::map<CoreNode, int> ids;
    std::vector<CoreNode> nodes;

    int get(CoreNode n) {
        auto it = ids.find(n);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(nodes.size());
        if (id >= 64) throw InputError("formula too large for the tableau translation");
        ids.emplace(n, id);
        nodes.push_back(n);
        return id;
    }

    int atom(ltl::LetterSet p) { return get({CoreOp::Atom, std::move(p), -1, -1}); }
    int mk(CoreOp op, int l, int r = -1) { return get({op, {}, l, r}); }
};

/// Desugar an NNF formula into the core (no negations, no sugar).
inline int to_core(CorePool& pool, const Alphabet& actions, const ltl::FormulaPtr& f) {
    using ltl::Op;
    switch (f->op) {
        case Op::Atom:
            return pool.atom(f->pred);
        case Op::And:
            return pool.mk(CoreOp::And, to_core(pool, actions, f->lhs), to_core(pool, actions, f->rhs));
        case Op::Or:
            return pool.mk(CoreOp::Or, to_core(pool, actions, f->lhs), to_core(pool, actions, f->rhs));
        case Op::Next:
            return pool.mk(CoreOp::Next, to_core(pool, actions, f->lhs));
        case Op::Until:
            return pool.mk(CoreOp::Until, to_core(pool, actions, f->lhs),
                           to_core(pool, actions, f->rhs));
        case Op::WUntil: {
            // l W r = r R (l ∨ r)
            int l = to_core(pool, actions, f->lhs);
            int r = to_core(pool, actions, f->rhs);
            return pool.mk(CoreOp::Release, r, pool.mk(CoreOp::Or, l, r));
        }
        case Op::Future:
            return pool.mk(CoreOp::Until, pool.atom(ltl::LetterSet(actions.symbols())),
                           to_core(pool, actions, f->lhs));
        case Op::Globally:
            return pool.mk(CoreOp::Release, pool.atom({}), to_core(pool, actions, f->lhs));
        case Op::SFuture:
            return pool.mk(CoreOp::Next,
                           pool.mk(CoreOp::Until, pool.atom(ltl::LetterSet(actions.symbols())),
                                   to_core(pool, actions, f->lhs)));
        case Op::SGlobally:
            return pool.mk(CoreOp::Next,
                           pool.mk(CoreOp::Release, pool.atom({}), to_core(pool, actions, f->lhs)));
        case Op::Not:
            throw SoundnessError("tableau: negation survived normal form");
    }
    throw SoundnessError("tableau: unhandled operator");
}

using Members = std::uint64_t;

struct Expansion {
    Members members = 0;
    ltl::LetterSet pred;   // letters satisfying every asserted atom
    Members next = 0;      // arguments of asserted Next-obligations
};

/// All saturated branches of the closure expansion of `base`.
inline std::vector<Expansion> expand(CorePool& pool, const Alphabet& actions, Members base) {
    std::vector<Expansion> out;
    std::set<Members> seen;
    struct Item {
        Members members;
        Members todo;
    };
    std::deque<Item> stack;
    stack.push_back({base, base});
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        // pick an unprocessed non-terminal formula
        int pick = -1;
        for (int id = 0; id < static_cast<int>(pool.nodes.size()); ++id) {
            if (!(it.todo >> id & 1)) continue;
            CoreOp op = pool.nodes[id].op;
            if (op == CoreOp::Atom || op == CoreOp::Next) continue;
            pick = id;
            break;
        }
        if (pick < 0) {
            if (!seen.insert(it.members).second) continue;
            Expansion e;
            e.members = it.members;
            e.pred = ltl::LetterSet(actions.symbols());
            for (int id = 0; id < static_cast<int>(pool.nodes.size()); ++id) {
                if (!(it.members >> id & 1)) continue;
                const CoreNode& n = pool.nodes[id];
                if (n.op == CoreOp::Atom) e.pred = ltl::ls_intersect(e.pred, n.pred);
                if (n.op == CoreOp::Next) e.next |= Members(1) << n.lhs;
            }
            out.push_back(std::move(e));
            continue;
        }
        const CoreNode& n = pool.nodes[pick];
        Members done = it.todo & ~(Members(1) << pick);
        auto push_with = [&](std::initializer_list<int> adds) {
            Item ni{it.members, done};
            for (int a : adds) {
                Members bit = Members(1) << a;
                if (!(ni.members & bit)) {
                    ni.members |= bit;
                    ni.todo |= bit;
                }
            }
            stack.push_back(ni);
        };
        switch (n.op) {
            case CoreOp::And:
                push_with({n.lhs, n.rhs});
                break;
            case CoreOp::Or:
                push_with({n.lhs});
                push_with({n.rhs});
                break;
            case CoreOp::Until:
                push_with({n.rhs});
                push_with({n.lhs, pool.mk(CoreOp::Next, pick)});
                break;
            case CoreOp::Release:
                push_with({n.rhs, n.lhs});
                push_with({n.rhs, pool.mk(CoreOp::Next, pick)});
                break;
            default:
                break;
        }
    }
    return out;
}

}  // namespace detail_tableau

/// The Büchi automaton of an LTL formula: L(result) = the set of infinite
/// action words satisfying it.
inline Nbwa tableau(const ltl::LtlFormula& formula) {
    using namespace detail_tableau;
    ltl::LtlFormula n = ltl::nnf(formula);
    CorePool pool;
    int root = to_core(pool, n.actions, n.root);
    // Note: expand() may create Next-wrappers, so collect the until list after
    // a first expansion pass of the root.
    std::map<Members, std::vector<Expansion>> expansions;
    auto expansions_of = [&](Members base) -> const std::vector<Expansion>& {
        auto it = expansions.find(base);
        if (it == expansions.end())
            it = expansions.emplace(base, expand(pool, n.actions, base)).first;
        return it->second;
    };
    const std::vector<Expansion>& initial_exps = expansions_of(Members(1) << root);

    std::vector<int> until_list;
    for (int id = 0; id < static_cast<int>(pool.nodes.size()); ++id)
        if (pool.nodes[id].op == CoreOp::Until) until_list.push_back(id);
    const std::uint32_t k = static_cast<std::uint32_t>(until_list.size());

    auto fulfilled = [&](const Expansion& e, int theta) {
        return !(e.members >> theta & 1) ||
               (e.members >> pool.nodes[theta].rhs & 1);
    };

    Nbwa out;
    out.actions = n.actions;
    std::map<std::pair<Members, std::uint32_t>, State> ids;
    std::deque<std::pair<const Expansion*, std::uint32_t>> todo;
    auto get = [&](const Expansion& e, std::uint32_t counter) {
        auto key = std::make_pair(e.members, counter);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        State s = out.add_state();
        ids.emplace(key, s);
        out.accepting[s] = (counter == k);
        todo.emplace_back(&e, counter);
        return s;
    };
    for (const Expansion& e : initial_exps) out.initials.push_back(get(e, 0));
    while (!todo.empty()) {
        auto [e, counter] = todo.front();
        todo.pop_front();
        State src = ids[{e->members, counter}];
        const std::vector<Expansion>& succs = expansions_of(e->next);
        for (const Expansion& e2 : succs) {
            std::uint32_t base = counter == k ? 0 : counter;
            std::uint32_t nxt =
                (base < k && fulfilled(e2, until_list[base])) ? base + 1 : base;
            State dst = get(e2, nxt);
            for (Symbol a : e->pred) out.transitions.push_back({src, a, dst});
        }
    }
    std::sort(out.initials.begin(), out.initials.end());
    out.initials.erase(std::unique(out.initials.begin(), out.initials.end()), out.initials.end());
    std::sort(out.transitions.begin(), out.transitions.end());
    out.transitions.erase(std::unique(out.transitions.begin(), out.transitions.end()),
                          out.transitions.end());
    return buchi::trim(out);
}

/// Does the ultimately periodic word u·v^ω belong to L(a)?
inline bool nbwa_lasso_member(const Nbwa& a, const Word& u, const Word& v) {
    if (v.empty()) throw InputError("lasso period must be non-empty");
    std::vector<Symbol> letters(u);
    letters.insert(letters.end(), v.begin(), v.end());
    const std::size_t P = letters.size();
    auto succ = [&](std::size_t i) { return i + 1 < P ? i + 1 : u.size(); };

    std::vector<std::vector<std::pair<Symbol, State>>> adj(a.num_states);
    for (const auto& t : a.transitions) adj[t.src].emplace_back(t.sym, t.dst);

    auto node = [&](State q, std::size_t i) { return static_cast<std::uint32_t>(q * P + i); };
    std::vector<char> reach(a.num_states * P, 0);
    std::deque<std::pair<State, std::size_t>> q;
    for (State s : a.initials) {
        reach[node(s, 0)] = 1;
        q.emplace_back(s, 0);
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    while (!q.empty()) {
        auto [s, i] = q.front();
        q.pop_front();
        for (const auto& [sym, dst] : adj[s]) {
            if (sym != letters[i]) continue;
            std::uint32_t to = node(dst, succ(i));
            edges.emplace_back(node(s, i), to);
            if (!reach[to]) {
                reach[to] = 1;
                q.emplace_back(dst, succ(i));
            }
        }
    }
    // accepting iff a reachable non-trivial SCC contains an accepting state
    graph::SccResult comps = graph::scc(a.num_states * P, edges);
    std::vector<std::uint32_t> size(comps.count, 0);
    std::vector<char> has_edge(comps.count, 0), has_acc(comps.count, 0), comp_reach(comps.count, 0);
    for (std::uint32_t i = 0; i < a.num_states * P; ++i)
        if (reach[i]) {
            ++size[comps.comp[i]];
            comp_reach[comps.comp[i]] = 1;
            if (a.accepting[i / P]) has_acc[comps.comp[i]] = 1;
        }
    for (auto [x, y] : edges)
        if (comps.comp[x] == comps.comp[y]) has_edge[comps.comp[x]] = 1;
    for (std::uint32_t c = 0; c < comps.count; ++c)
        if (comp_reach[c] && has_acc[c] && (size[c] >= 2 || has_edge[c])) return true;
    return false;
}

/// Witness of 1-weakness (a topological index over the non-self-loop graph)
/// or a refuting cycle through at least two states.
struct OneWeakResult {
    bool one_weak;
    std::vector<std::uint32_t> order;   // valid when one_weak
    std::vector<State> cycle;           // valid when !one_weak
};

inline OneWeakResult one_weak_check(const Nbwa& a) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& t : a.transitions)
        if (t.src != t.dst) edges.emplace_back(t.src, t.dst);
    auto order = graph::topological_index(a.num_states, edges);
    if (order) return {true, *order, {}};
    auto cycle = graph::find_cycle(a.num_states, edges);
    if (!cycle) throw SoundnessError("one-weak check: cyclic graph without a cycle");
    return {false, {}, *cycle};
}

}  // namespace rmc
