/* nfa.hpp -- nondeterministic finite automata over interned alphabets.
 *
 * Every regular set in the library is one of these. Values are immutable
 * after construction; all operations are pure functions returning fresh
 * automata. Results are trimmed (useless states removed) except where the
 * contract requires a complete automaton (complement, determinize).
 */

#pragma once

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rmc/symbols.hpp"

namespace rmc {

struct Transition {
    State src;
    Symbol sym;
    State dst;
    auto operator<=>(const Transition&) const = default;
};

struct Nfa {
    Alphabet alphabet;
    State num_states = 0;
    std::vector<State> initials;  // sorted unique
    std::vector<State> finals;    // sorted unique
    std::vector<Transition> transitions;  // sorted unique

    Nfa() = default;
    explicit Nfa(Alphabet a) : alphabet(std::move(a)) {}

    State add_state() { return num_states++; }

    void add_initial(State q) { initials.push_back(q); }
    void add_final(State q) { finals.push_back(q); }

    void add_transition(State src, Symbol sym, State dst) {
        transitions.push_back({src, sym, dst});
    }

    /// Sort and deduplicate the bulk-built parts. Call once after building.
    void finish() {
        auto norm = [](std::vector<State>& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        norm(initials);
        norm(finals);
        std::sort(transitions.begin(), transitions.end());
        transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
    }

    bool is_initial(State q) const { return std::binary_search(initials.begin(), initials.end(), q); }
    bool is_final(State q) const { return std::binary_search(finals.begin(), finals.end(), q); }
};

/// Per-state outgoing transitions, sorted by symbol.
struct Adjacency {
    std::vector<std::vector<std::pair<Symbol, State>>> out;

    static Adjacency of(const Nfa& a) {
        Adjacency adj;
        adj.out.resize(a.num_states);
        for (const auto& t : a.transitions) adj.out[t.src].emplace_back(t.sym, t.dst);
        for (auto& v : adj.out) std::sort(v.begin(), v.end());
        return adj;
    }

    /// Successors of `q` on `sym` (contiguous range in the sorted vector).
    std::pair<std::size_t, std::size_t> range(State q, Symbol sym) const {
        const auto& v = out[q];
        auto lo = std::lower_bound(v.begin(), v.end(), std::make_pair(sym, State{0}));
        auto hi = std::upper_bound(v.begin(), v.end(),
                                   std::make_pair(sym, std::numeric_limits<State>::max()));
        return {static_cast<std::size_t>(lo - v.begin()), static_cast<std::size_t>(hi - v.begin())};
    }

    void step_into(State q, Symbol sym, std::vector<State>& dst) const {
        auto [lo, hi] = range(q, sym);
        for (std::size_t i = lo; i < hi; ++i) dst.push_back(out[q][i].second);
    }
};

inline std::vector<State> subset_step(const Adjacency& adj, const std::vector<State>& set, Symbol sym) {
    std::vector<State> next;
    for (State q : set) adj.step_into(q, sym, next);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    return next;
}

inline bool contains_final(const Nfa& a, const std::vector<State>& set) {
    for (State q : set)
        if (a.is_final(q)) return true;
    return false;
}

inline bool member(const Nfa& a, const Word& w) {
    for (Symbol s : w)
        if (!a.alphabet.contains(s))
            throw InputError("word contains a letter outside the automaton alphabet: " + symbol_name(s));
    Adjacency adj = Adjacency::of(a);
    std::vector<State> cur = a.initials;
    for (Symbol s : w) {
        cur = subset_step(adj, cur, s);
        if (cur.empty()) return false;
    }
    return contains_final(a, cur);
}

/// Keep only states reachable from an initial and co-reachable to a final.
inline Nfa trim(const Nfa& a) {
    std::vector<char> fwd(a.num_states, 0), bwd(a.num_states, 0);
    {
        std::deque<State> q(a.initials.begin(), a.initials.end());
        for (State s : a.initials) fwd[s] = 1;
        std::vector<std::vector<State>> succ(a.num_states);
        for (const auto& t : a.transitions) succ[t.src].push_back(t.dst);
        while (!q.empty()) {
            State s = q.front();
            q.pop_front();
            for (State d : succ[s])
                if (!fwd[d]) {
                    fwd[d] = 1;
                    q.push_back(d);
                }
        }
    }
    {
        std::deque<State> q(a.finals.begin(), a.finals.end());
        for (State s : a.finals) bwd[s] = 1;
        std::vector<std::vector<State>> pred(a.num_states);
        for (const auto& t : a.transitions) pred[t.dst].push_back(t.src);
        while (!q.empty()) {
            State s = q.front();
            q.pop_front();
            for (State d : pred[s])
                if (!bwd[d]) {
                    bwd[d] = 1;
                    q.push_back(d);
                }
        }
    }
    std::vector<State> remap(a.num_states, UINT32_MAX);
    Nfa out(a.alphabet);
    for (State s = 0; s < a.num_states; ++s)
        if (fwd[s] && bwd[s]) remap[s] = out.add_state();
    for (State s : a.initials)
        if (remap[s] != UINT32_MAX) out.add_initial(remap[s]);
    for (State s : a.finals)
        if (remap[s] != UINT32_MAX) out.add_final(remap[s]);
    for (const auto& t : a.transitions)
        if (remap[t.src] != UINT32_MAX && remap[t.dst] != UINT32_MAX)
            out.add_transition(remap[t.src], t.sym, remap[t.dst]);
    out.finish();
    return out;
}

namespace detail {

struct FlatSigHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const {
        std::size_t h = 0xcbf29ce484222325ull;
        for (std::uint64_t x : v) {
            h ^= x;
            h *= 0x100000001b3ull;
        }
        return h;
    }
};

}  // namespace detail

/// Quotient by forward bisimulation: states with equal acceptance flag and
/// equal symbol-to-successor-class maps collapse. Language preserving.
inline Nfa bisim_quotient(const Nfa& a) {
    if (a.num_states == 0) return a;
    Adjacency adj = Adjacency::of(a);
    std::vector<std::uint32_t> cls(a.num_states);
    bool any_final = false, any_nonfinal = false;
    for (State s = 0; s < a.num_states; ++s) {
        cls[s] = a.is_final(s) ? 1 : 0;
        (a.is_final(s) ? any_final : any_nonfinal) = true;
    }
    std::size_t n_classes = (any_final ? 1u : 0u) + (any_nonfinal ? 1u : 0u);
    std::vector<std::uint64_t> sig;
    std::vector<std::uint64_t> bucket;
    for (;;) {
        std::unordered_map<std::vector<std::uint64_t>, std::uint32_t, detail::FlatSigHash> sig_ids;
        sig_ids.reserve(a.num_states * 2);
        std::vector<std::uint32_t> next(a.num_states);
        for (State s = 0; s < a.num_states; ++s) {
            // flat signature: [final, sym, succ classes..., sym, ...] with the
            // per-symbol class lists sorted and deduplicated
            sig.clear();
            sig.push_back(a.is_final(s) ? 1 : 0);
            const auto& out = adj.out[s];
            std::size_t i = 0;
            while (i < out.size()) {
                Symbol sym = out[i].first;
                bucket.clear();
                while (i < out.size() && out[i].first == sym) bucket.push_back(cls[out[i++].second]);
                std::sort(bucket.begin(), bucket.end());
                bucket.erase(std::unique(bucket.begin(), bucket.end()), bucket.end());
                sig.push_back((std::uint64_t(sym) << 32) | 0xffffffffull);
                sig.insert(sig.end(), bucket.begin(), bucket.end());
            }
            auto it = sig_ids.find(sig);
            if (it == sig_ids.end())
                it = sig_ids.emplace(sig, static_cast<std::uint32_t>(sig_ids.size())).first;
            next[s] = it->second;
        }
        if (sig_ids.size() == n_classes) {
            cls = next;
            break;
        }
        n_classes = sig_ids.size();
        cls = next;
    }
    Nfa out(a.alphabet);
    out.num_states = static_cast<State>(n_classes);
    for (State s : a.initials) out.add_initial(cls[s]);
    for (State s : a.finals) out.add_final(cls[s]);
    for (const auto& t : a.transitions) out.add_transition(cls[t.src], t.sym, cls[t.dst]);
    out.finish();
    return out;
}

inline Nfa reverse(const Nfa& a) {
    Nfa out(a.alphabet);
    out.num_states = a.num_states;
    out.initials = a.finals;
    out.finals = a.initials;
    for (const auto& t : a.transitions) out.add_transition(t.dst, t.sym, t.src);
    out.finish();
    return out;
}

/// trim + bisimulation reduction both ways; cheap and shrinks iterated
/// products considerably.
inline Nfa reduce(const Nfa& a) {
    Nfa t = bisim_quotient(trim(a));
    t = reverse(bisim_quotient(reverse(t)));
    t.finish();
    return t;
}

inline Nfa empty_nfa(const Alphabet& alpha) { return Nfa(alpha); }

inline Nfa universal_nfa(const Alphabet& alpha) {
    Nfa a(alpha);
    State q = a.add_state();
    a.add_initial(q);
    a.add_final(q);
    for (Symbol s : alpha) a.add_transition(q, s, q);
    a.finish();
    return a;
}

inline Nfa singleton_nfa(const Alphabet& alpha, const Word& w) {
    for (Symbol s : w)
        if (!alpha.contains(s)) throw InputError("singleton word leaves the alphabet");
    Nfa a(alpha);
    State cur = a.add_state();
    a.add_initial(cur);
    for (Symbol s : w) {
        State nxt = a.add_state();
        a.add_transition(cur, s, nxt);
        cur = nxt;
    }
    a.add_final(cur);
    a.finish();
    return a;
}

inline void require_same_alphabet(const Nfa& a, const Nfa& b, const char* what) {
    if (!(a.alphabet == b.alphabet))
        throw InputError(std::string(what) + ": alphabet mismatch");
}

/// Product construction over reachable pairs only.
inline Nfa intersect(const Nfa& a, const Nfa& b) {
    require_same_alphabet(a, b, "intersect");
    Adjacency aa = Adjacency::of(a), ab = Adjacency::of(b);
    Nfa out(a.alphabet);
    std::unordered_map<std::uint64_t, State> ids;
    std::deque<std::pair<State, State>> todo;
    auto key = [](State x, State y) { return (std::uint64_t(x) << 32) | y; };
    auto get = [&](State x, State y) {
        auto it = ids.find(key(x, y));
        if (it != ids.end()) return it->second;
        State q = out.add_state();
        ids.emplace(key(x, y), q);
        todo.emplace_back(x, y);
        if (a.is_final(x) && b.is_final(y)) out.add_final(q);
        return q;
    };
    for (State x : a.initials)
        for (State y : b.initials) out.add_initial(get(x, y));
    while (!todo.empty()) {
        auto [x, y] = todo.front();
        todo.pop_front();
        State q = ids[key(x, y)];
        const auto& ox = aa.out[x];
        const auto& oy = ab.out[y];
        std::size_t i = 0, j = 0;
        while (i < ox.size() && j < oy.size()) {
            if (ox[i].first < oy[j].first) { ++i; continue; }
            if (oy[j].first < ox[i].first) { ++j; continue; }
            Symbol sym = ox[i].first;
            std::size_t i2 = i, j2 = j;
            while (i2 < ox.size() && ox[i2].first == sym) ++i2;
            while (j2 < oy.size() && oy[j2].first == sym) ++j2;
            for (std::size_t p = i; p < i2; ++p)
                for (std::size_t q2 = j; q2 < j2; ++q2)
                    out.add_transition(q, sym, get(ox[p].second, oy[q2].second));
            i = i2;
            j = j2;
        }
    }
    out.finish();
    return trim(out);
}

inline Nfa unite(const Nfa& a, const Nfa& b) {
    require_same_alphabet(a, b, "union");
    Nfa out(a.alphabet);
    out.num_states = a.num_states + b.num_states;
    State off = a.num_states;
    out.initials = a.initials;
    out.finals = a.finals;
    out.transitions = a.transitions;
    for (State s : b.initials) out.add_initial(off + s);
    for (State s : b.finals) out.add_final(off + s);
    for (const auto& t : b.transitions) out.add_transition(off + t.src, t.sym, off + t.dst);
    out.finish();
    return trim(out);
}

namespace detail {

struct SubsetSpace {
    std::map<std::vector<State>, State> ids;
    std::vector<std::vector<State>> sets;

    State get(std::vector<State> set) {
        auto it = ids.find(set);
        if (it != ids.end()) return it->second;
        State id = static_cast<State>(sets.size());
        ids.emplace(set, id);
        sets.push_back(std::move(set));
        return id;
    }
};

}  // namespace detail

/// Subset construction; the result is deterministic and complete over the
/// declared alphabet (the empty subset acts as the sink).
inline Nfa determinize(const Nfa& a) {
    Adjacency adj = Adjacency::of(a);
    detail::SubsetSpace space;
    State start = space.get(a.initials);
    Nfa out(a.alphabet);
    out.add_state();
    out.add_initial(0);
    std::deque<State> todo{start};
    std::vector<char> done{0};
    if (contains_final(a, space.sets[start])) out.add_final(0);
    while (!todo.empty()) {
        State id = todo.front();
        todo.pop_front();
        if (done[id]) continue;
        done[id] = 1;
        std::vector<State> cur = space.sets[id];
        for (Symbol sym : a.alphabet) {
            std::vector<State> nxt = subset_step(adj, cur, sym);
            State nid = space.get(std::move(nxt));
            while (out.num_states <= nid) {
                out.add_state();
                done.push_back(0);
                if (contains_final(a, space.sets[out.num_states - 1])) out.add_final(out.num_states - 1);
            }
            out.add_transition(id, sym, nid);
            if (!done[nid]) todo.push_back(nid);
        }
    }
    out.finish();
    return out;
}

/// Subset construction that gives up once it exceeds `max_states`.
inline std::optional<Nfa> determinize_capped(const Nfa& a, std::size_t max_states) {
    Adjacency adj = Adjacency::of(a);
    detail::SubsetSpace space;
    State start = space.get(a.initials);
    Nfa out(a.alphabet);
    out.add_state();
    out.add_initial(0);
    std::deque<State> todo{start};
    std::vector<char> done{0};
    if (contains_final(a, space.sets[start])) out.add_final(0);
    while (!todo.empty()) {
        State id = todo.front();
        todo.pop_front();
        if (done[id]) continue;
        done[id] = 1;
        std::vector<State> cur = space.sets[id];
        for (Symbol sym : a.alphabet) {
            std::vector<State> nxt = subset_step(adj, cur, sym);
            State nid = space.get(std::move(nxt));
            if (nid >= max_states) return std::nullopt;
            while (out.num_states <= nid) {
                out.add_state();
                done.push_back(0);
                if (contains_final(a, space.sets[out.num_states - 1])) out.add_final(out.num_states - 1);
            }
            out.add_transition(id, sym, nid);
            if (!done[nid]) todo.push_back(nid);
        }
    }
    out.finish();
    return out;
}

/// Canonical small form of a language automaton: the minimal deterministic
/// automaton when the subset construction stays within budget, otherwise the
/// bisimulation-reduced nondeterministic one. Dense intermediate sets
/// otherwise dominate iterated pre-image computations.
inline Nfa compact(const Nfa& a, std::size_t det_budget = 0) {
    Nfa reduced = reduce(a);
    if (det_budget == 0) det_budget = 16 * (reduced.num_states + 4);
    auto det = determinize_capped(reduced, det_budget);
    if (!det) return reduced;
    Nfa min = bisim_quotient(trim(*det));
    return min.num_states <= reduced.num_states * 2 ? min : reduced;
}

/// Complement over alphabet*; deterministic and complete by construction.
inline Nfa complement(const Nfa& a) {
    Nfa det = determinize(a);
    std::vector<State> flipped;
    for (State s = 0; s < det.num_states; ++s)
        if (!det.is_final(s)) flipped.push_back(s);
    det.finals = std::move(flipped);
    return det;
}

/// Shortest accepted word, if any (BFS over states).
inline std::optional<Word> shortest_accepted(const Nfa& a) {
    std::vector<int> parent(a.num_states, -1);
    std::vector<Symbol> via(a.num_states, 0);
    std::vector<char> seen(a.num_states, 0);
    std::deque<State> q;
    for (State s : a.initials) {
        seen[s] = 1;
        q.push_back(s);
    }
    Adjacency adj = Adjacency::of(a);
    std::optional<State> hit;
    for (State s : a.initials)
        if (a.is_final(s)) hit = s;
    while (!hit && !q.empty()) {
        State s = q.front();
        q.pop_front();
        for (const auto& [sym, dst] : adj.out[s]) {
            if (seen[dst]) continue;
            seen[dst] = 1;
            parent[dst] = static_cast<int>(s);
            via[dst] = sym;
            if (a.is_final(dst)) {
                hit = dst;
                break;
            }
            q.push_back(dst);
        }
    }
    if (!hit) return std::nullopt;
    Word w;
    State cur = *hit;
    while (parent[cur] >= 0) {
        w.push_back(via[cur]);
        cur = static_cast<State>(parent[cur]);
    }
    std::reverse(w.begin(), w.end());
    return w;
}

struct EmptinessResult {
    bool empty;
    std::optional<Word> witness;  // a minimal-length member when non-empty
};

inline EmptinessResult is_empty(const Nfa& a) {
    auto w = shortest_accepted(a);
    if (w) return {false, w};
    return {true, std::nullopt};
}

struct EquivalenceResult {
    bool equal;
    std::optional<Word> separator;  // shortest word in the symmetric difference
};

/// Exact language equivalence via a joint lazy subset construction; returns
/// a shortest separating word on failure.
inline EquivalenceResult equivalent(const Nfa& a, const Nfa& b) {
    require_same_alphabet(a, b, "equivalent");
    Adjacency aa = Adjacency::of(a), ab = Adjacency::of(b);
    detail::SubsetSpace sa, sb;
    struct Node {
        State ia, ib;
        int parent;
        Symbol via;
    };
    std::vector<Node> nodes;
    std::map<std::pair<State, State>, int> seen;
    std::deque<int> q;
    auto push = [&](State ia, State ib, int parent, Symbol via) {
        auto k = std::make_pair(ia, ib);
        if (seen.count(k)) return;
        seen.emplace(k, static_cast<int>(nodes.size()));
        nodes.push_back({ia, ib, parent, via});
        q.push_back(static_cast<int>(nodes.size()) - 1);
    };
    push(sa.get(a.initials), sb.get(b.initials), -1, 0);
    while (!q.empty()) {
        int id = q.front();
        q.pop_front();
        const Node n = nodes[id];
        bool fa = contains_final(a, sa.sets[n.ia]);
        bool fb = contains_final(b, sb.sets[n.ib]);
        if (fa != fb) {
            Word w;
            int cur = id;
            while (nodes[cur].parent >= 0) {
                w.push_back(nodes[cur].via);
                cur = nodes[cur].parent;
            }
            std::reverse(w.begin(), w.end());
            return {false, w};
        }
        for (Symbol sym : a.alphabet) {
            State na = sa.get(subset_step(aa, sa.sets[n.ia], sym));
            State nb = sb.get(subset_step(ab, sb.sets[n.ib], sym));
            push(na, nb, id, sym);
        }
    }
    return {true, std::nullopt};
}

struct InclusionResult {
    bool included;
    std::optional<Word> counterexample;  // in L(b) but not in L(a)
};

/// Exact check of L(a) ⊇ L(b).
inline InclusionResult includes(const Nfa& a, const Nfa& b) {
    require_same_alphabet(a, b, "includes");
    Adjacency aa = Adjacency::of(a), ab = Adjacency::of(b);
    detail::SubsetSpace sa, sb;
    struct Node {
        State ia, ib;
        int parent;
        Symbol via;
    };
    std::vector<Node> nodes;
    std::map<std::pair<State, State>, int> seen;
    std::deque<int> q;
    auto push = [&](State ia, State ib, int parent, Symbol via) {
        auto k = std::make_pair(ia, ib);
        if (seen.count(k)) return;
        seen.emplace(k, static_cast<int>(nodes.size()));
        nodes.push_back({ia, ib, parent, via});
        q.push_back(static_cast<int>(nodes.size()) - 1);
    };
    push(sa.get(a.initials), sb.get(b.initials), -1, 0);
    while (!q.empty()) {
        int id = q.front();
        q.pop_front();
        const Node n = nodes[id];
        bool fa = contains_final(a, sa.sets[n.ia]);
        bool fb = contains_final(b, sb.sets[n.ib]);
        if (fb && !fa) {
            Word w;
            int cur = id;
            while (nodes[cur].parent >= 0) {
                w.push_back(nodes[cur].via);
                cur = nodes[cur].parent;
            }
            std::reverse(w.begin(), w.end());
            return {false, w};
        }
        // Once the b-side is empty nothing below can witness non-inclusion.
        if (sb.sets[n.ib].empty()) continue;
        for (Symbol sym : a.alphabet) {
            State na = sa.get(subset_step(aa, sa.sets[n.ia], sym));
            State nb = sb.get(subset_step(ab, sb.sets[n.ib], sym));
            push(na, nb, id, sym);
        }
    }
    return {true, std::nullopt};
}

/// All accepted words of length <= maxlen, lexicographic per length.
inline std::vector<Word> enumerate_accepted(const Nfa& a, std::size_t maxlen) {
    std::vector<Word> out;
    Adjacency adj = Adjacency::of(a);
    struct Item {
        Word w;
        std::vector<State> set;
    };
    std::deque<Item> todo;
    todo.push_back({{}, a.initials});
    while (!todo.empty()) {
        Item it = std::move(todo.front());
        todo.pop_front();
        if (contains_final(a, it.set)) out.push_back(it.w);
        if (it.w.size() == maxlen) continue;
        for (Symbol sym : a.alphabet) {
            std::vector<State> nxt = subset_step(adj, it.set, sym);
            if (nxt.empty()) continue;
            Word w2 = it.w;
            w2.push_back(sym);
            todo.push_back({std::move(w2), std::move(nxt)});
        }
    }
    return out;
}

/// Replace each symbol via `fn` (new alphabet supplied by the caller).
inline Nfa relabel(const Nfa& a, const Alphabet& new_alpha,
                   const std::function<Symbol(Symbol)>& fn) {
    Nfa out(new_alpha);
    out.num_states = a.num_states;
    out.initials = a.initials;
    out.finals = a.finals;
    for (const auto& t : a.transitions) out.add_transition(t.src, fn(t.sym), t.dst);
    out.finish();
    return out;
}

/// {w : w·suffix ∈ L(a)}.
inline Nfa right_quotient(const Nfa& a, const Word& suffix) {
    Adjacency adj = Adjacency::of(a);
    // States from which reading `suffix` can reach a final state.
    std::vector<char> ok(a.num_states, 0);
    for (State s : a.finals) ok[s] = 1;
    for (auto it = suffix.rbegin(); it != suffix.rend(); ++it) {
        std::vector<char> prev(a.num_states, 0);
        for (State s = 0; s < a.num_states; ++s) {
            auto [lo, hi] = adj.range(s, *it);
            for (std::size_t i = lo; i < hi; ++i)
                if (ok[adj.out[s][i].second]) {
                    prev[s] = 1;
                    break;
                }
        }
        ok = std::move(prev);
    }
    Nfa out = a;
    out.finals.clear();
    for (State s = 0; s < a.num_states; ++s)
        if (ok[s]) out.add_final(s);
    out.finish();
    return trim(out);
}

inline Nfa with_alphabet(const Nfa& a, Alphabet alpha) {
    Nfa out = a;
    out.alphabet = std::move(alpha);
    return out;
}

/// {w·sym : w ∈ L(a)}; the alphabet is widened to contain `sym`.
inline Nfa append_symbol(const Nfa& a, Symbol sym) {
    Nfa out = a;
    out.alphabet = a.alphabet.unioned(Alphabet({sym}));
    State nf = out.add_state();
    for (State s : a.finals) out.add_transition(s, sym, nf);
    out.finals.clear();
    out.add_final(nf);
    out.finish();
    return trim(out);
}

/// {sym·w : w ∈ L(a)}; the alphabet is widened to contain `sym`.
inline Nfa prepend_symbol(const Nfa& a, Symbol sym) {
    Nfa out = a;
    out.alphabet = a.alphabet.unioned(Alphabet({sym}));
    State ni = out.add_state();
    for (State s : a.initials) out.add_transition(ni, sym, s);
    out.initials.clear();
    out.add_initial(ni);
    out.finish();
    return trim(out);
}

}  // namespace rmc
