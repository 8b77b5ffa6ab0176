/* recurrence.hpp -- infinite-chain detection for transitive regular relations
 * and recurrent reachability built on top of it.
 *
 * The chain set {x : x starts an infinite r-chain} is approached from both
 * sides: a certified lower bound made of three executable pump families
 * (loops, self-covers, bounded-tail pumps) plus one pre-image step, and an
 * upper bound from a capped greatest-fixpoint iteration of the pre-image
 * operator, exact when it converges. Every lower-bound member carries a
 * witness whose expansion is validated pair by pair.
 */

#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmc/nfa.hpp"
#include "rmc/symbols.hpp"
#include "rmc/transducer.hpp"

namespace rmc {

struct RecurrenceConfig {
    std::uint32_t max_gfp_iterations = 32;
    std::uint32_t tail_bound = 3;  // longest explicit pump loop word
    // Treat a relation whose every pair strictly shrinks the word as having
    // no chains at all (the plain fixpoint never converges on those).
    bool decreasing_shortcut = false;
    // Give up on the fixpoint once an iterate grows beyond this many states
    // (0 = no limit). The last iterate is still a sound upper bound.
    std::uint32_t max_gfp_states = 0;
};

enum class BoundStatus { Converged, Bounded };
enum class ChainVerdict { Yes, No, Unknown };

struct RecurrenceResult {
    Nfa lower;   // certified members
    Nfa upper;   // all candidates; exact when status == Converged
    BoundStatus status = BoundStatus::Bounded;
    std::uint32_t iterations = 0;
};

struct PumpWitness {
    enum class Kind { Loop, SelfCover, BoundedTail };
    Kind kind = Kind::Loop;
    std::vector<Word> leads;   // leading chain elements stepping into the pump
    Word u, v, w;              // v non-empty except for plain loops
    State anchor = 0;          // transducer state hosting the pump
};

/// {x : (x, x) ∈ r}.
inline Nfa rel_loops(const Transducer& r) {
    Nfa diag = intersect(r.base, identity_on(universal_nfa(r.track)).base);
    return detail::project(diag, r.track, /*keep_left=*/true);
}

namespace detail_rec {

struct DiagGraph {
    // diagonal steps (x --(c,c)--> y) and pad-left steps (x --(_,c)--> y)
    std::vector<std::vector<std::pair<Symbol, State>>> diag, padl;

    static DiagGraph of(const Transducer& r) {
        DiagGraph g;
        g.diag.resize(r.base.num_states);
        g.padl.resize(r.base.num_states);
        for (const auto& t : r.base.transitions) {
            auto parts = SymbolTable::instance().pair_parts(t.sym);
            if (parts->first == parts->second && parts->first != SymbolTable::pad)
                g.diag[t.src].emplace_back(parts->first, t.dst);
            if (parts->first == SymbolTable::pad)
                g.padl[t.src].emplace_back(parts->second, t.dst);
        }
        return g;
    }
};

/// For each base state q: a non-empty word v such that q loops back to q on
/// the diagonal of v while a parallel copy reads the pad-left image of v into
/// acceptance. Any state holding such a v starts the chain u, uv, uv², ...
/// for every diagonal path u from an initial state to q.
inline std::map<State, Word> self_cover_goods(const Transducer& r) {
    std::map<State, Word> out;
    const DiagGraph g = DiagGraph::of(r);
    const State n = r.base.num_states;
    // candidate filter: q must reach acceptance through pad-left letters
    std::vector<char> can_flush(n, 0);
    {
        std::vector<std::vector<State>> pred(n);
        for (State s = 0; s < n; ++s)
            for (const auto& [c, d] : g.padl[s]) pred[d].push_back(s);
        std::deque<State> q(r.base.finals.begin(), r.base.finals.end());
        std::vector<char> seen(n, 0);
        for (State f : r.base.finals) seen[f] = 1;
        while (!q.empty()) {
            State s = q.front();
            q.pop_front();
            can_flush[s] = 1;
            for (State p : pred[s])
                if (!seen[p]) {
                    seen[p] = 1;
                    q.push_back(p);
                }
        }
        for (State f : r.base.finals) can_flush[f] = 1;
    }
    for (State q0 = 0; q0 < n; ++q0) {
        if (g.diag[q0].empty()) continue;
        // search pairs (x, y): x follows diag letters, y follows pad-left
        // letters of the same word, from (q0, q0) to (q0, final), >= 1 step
        struct Node {
            State x, y;
            int parent;
            Symbol via;
        };
        std::vector<Node> nodes{{q0, q0, -1, 0}};
        std::map<std::pair<State, State>, int> seen{{{q0, q0}, 0}};
        std::deque<int> bfs{0};
        std::optional<int> hit;
        while (!bfs.empty() && !hit) {
            int id = bfs.front();
            bfs.pop_front();
            const Node cur = nodes[id];
            for (const auto& [c, x2] : g.diag[cur.x]) {
                for (const auto& [c2, y2] : g.padl[cur.y]) {
                    if (c2 != c) continue;
                    if (!can_flush[y2] && !(x2 == q0 && r.base.is_final(y2))) continue;
                    auto key = std::make_pair(x2, y2);
                    if (seen.count(key)) continue;
                    seen.emplace(key, static_cast<int>(nodes.size()));
                    nodes.push_back({x2, y2, id, c});
                    if (x2 == q0 && r.base.is_final(y2)) {
                        hit = static_cast<int>(nodes.size()) - 1;
                        break;
                    }
                    bfs.push_back(static_cast<int>(nodes.size()) - 1);
                }
                if (hit) break;
            }
        }
        if (hit) {
            Word v;
            int cur = *hit;
            while (nodes[cur].parent >= 0) {
                v.push_back(nodes[cur].via);
                cur = nodes[cur].parent;
            }
            std::reverse(v.begin(), v.end());
            out.emplace(q0, std::move(v));
        }
    }
    return out;
}

/// The automaton of diagonal prefixes: same states as the base, transitions
/// only where both components agree, finals chosen by the caller.
inline Nfa diag_prefix_automaton(const Transducer& r, const std::vector<State>& finals) {
    Nfa out(r.track);
    out.num_states = r.base.num_states;
    out.initials = r.base.initials;
    for (State f : finals) out.add_final(f);
    for (const auto& t : r.base.transitions) {
        auto parts = SymbolTable::instance().pair_parts(t.sym);
        if (parts->first == parts->second && parts->first != SymbolTable::pad)
            out.add_transition(t.src, parts->first, t.dst);
    }
    out.finish();
    return out;
}

/// States reachable from the initial states along the diagonal of `u`.
inline std::vector<State> diag_reach(const Transducer& r, const Word& u) {
    const DiagGraph g = DiagGraph::of(r);
    std::vector<State> cur = r.base.initials;
    for (Symbol c : u) {
        std::vector<State> next;
        for (State s : cur)
            for (const auto& [c2, d] : g.diag[s])
                if (c2 == c) next.push_back(d);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        cur = std::move(next);
        if (cur.empty()) break;
    }
    return cur;
}

/// Does the base accept the convolution of (w, v·w) starting from `from`?
inline bool accepts_shifted_tail(const Transducer& r, State from, const Word& v, const Word& w) {
    Word right(v);
    right.insert(right.end(), w.begin(), w.end());
    Word pw = convolve(w, right);
    Adjacency adj = Adjacency::of(r.base);
    std::vector<State> cur{from};
    for (Symbol s : pw) {
        cur = subset_step(adj, cur, s);
        if (cur.empty()) return false;
    }
    return contains_final(r.base, cur);
}

/// All per-state loop words of length 1..maxlen (shortest per state kept).
inline std::map<State, std::vector<Word>> diag_loop_words(const Transducer& r,
                                                          std::uint32_t maxlen) {
    const DiagGraph g = DiagGraph::of(r);
    const State n = r.base.num_states;
    std::map<State, std::vector<Word>> out;
    // enumerate words over the track alphabet up to maxlen
    std::vector<Word> frontier{{}};
    for (std::uint32_t len = 1; len <= maxlen; ++len) {
        std::vector<Word> next;
        for (const auto& w : frontier)
            for (Symbol c : r.track) {
                Word w2 = w;
                w2.push_back(c);
                next.push_back(w2);
            }
        for (const auto& v : next) {
            // states with a diagonal v-loop
            for (State q = 0; q < n; ++q) {
                std::vector<State> cur{q};
                for (Symbol c : v) {
                    std::vector<State> stepped;
                    for (State s : cur)
                        for (const auto& [c2, d] : g.diag[s])
                            if (c2 == c) stepped.push_back(d);
                    std::sort(stepped.begin(), stepped.end());
                    stepped.erase(std::unique(stepped.begin(), stepped.end()), stepped.end());
                    cur = std::move(stepped);
                    if (cur.empty()) break;
                }
                if (std::binary_search(cur.begin(), cur.end(), q)) out[q].push_back(v);
            }
        }
        frontier = std::move(next);
    }
    return out;
}

}  // namespace detail_rec

/// Members that start the chain u, uv, uv², ... : a transducer state is
/// reached on the diagonal of u, loops on the diagonal of some non-empty v,
/// and accepts the pad-left image of the same v.
inline Nfa self_cover(const Transducer& r) {
    std::map<State, Word> goods = detail_rec::self_cover_goods(r);
    std::vector<State> finals;
    for (const auto& [q, v] : goods) finals.push_back(q);
    return reduce(detail_rec::diag_prefix_automaton(r, finals));
}

/// Members u·w that start the chain u v^n w for an explicit loop word v with
/// 1 <= |v| <= max_v: u reaches a diagonal v-loop state q and from q the
/// convolution of (w, v·w) is accepted. Cost grows with |Σ|^max_v.
inline Nfa bounded_tail_pump(const Transducer& r, std::uint32_t max_v) {
    if (max_v < 1) throw InputError("bounded tail pump: loop bound must be >= 1");
    std::map<State, std::vector<Word>> loops = detail_rec::diag_loop_words(r, max_v);
    Nfa out = empty_nfa(r.track);
    Adjacency adj = Adjacency::of(r.base);
    for (const auto& [q, vs] : loops) {
        for (const Word& v : vs) {
            // layered automaton: diagonal prefixes into q, then the buffered
            // tail reading w against the v-shifted right track
            Nfa part(r.track);
            const State n = r.base.num_states;
            // layer 0: diagonal part (states 0..n-1)
            part.num_states = n;
            for (State s : r.base.initials) part.add_initial(s);
            for (const auto& t : r.base.transitions) {
                auto parts = SymbolTable::instance().pair_parts(t.sym);
                if (parts->first == parts->second && parts->first != SymbolTable::pad)
                    part.add_transition(t.src, parts->first, t.dst);
            }
            // buffered layer: states (base state, buffer of |v| letters)
            std::map<std::pair<State, Word>, State> buf_ids;
            std::deque<std::pair<State, Word>> todo;
            auto flush_accepts = [&](State s, const Word& buf) {
                std::vector<State> cur{s};
                for (Symbol d : buf) {
                    cur = subset_step(adj, cur, pair_symbol(SymbolTable::pad, d));
                    if (cur.empty()) return false;
                }
                return contains_final(r.base, cur);
            };
            std::function<State(State, const Word&)> get = [&](State s, const Word& buf) {
                auto key = std::make_pair(s, buf);
                auto it = buf_ids.find(key);
                if (it != buf_ids.end()) return it->second;
                State id = part.add_state();
                buf_ids.emplace(key, id);
                todo.emplace_back(s, buf);
                if (flush_accepts(s, buf)) part.add_final(id);
                return id;
            };
            // entering the buffered layer at q with buffer v costs no letter:
            // redirect every diagonal edge into q, and initial states equal to q
            State entry = get(q, v);
            if (r.base.is_initial(q)) part.add_initial(entry);
            for (const auto& t : r.base.transitions) {
                auto parts = SymbolTable::instance().pair_parts(t.sym);
                if (t.dst == q && parts->first == parts->second && parts->first != SymbolTable::pad)
                    part.add_transition(t.src, parts->first, entry);
            }
            while (!todo.empty()) {
                auto [s, buf] = todo.front();
                todo.pop_front();
                State src = buf_ids[{s, buf}];
                for (Symbol c : r.track) {
                    std::vector<State> stepped;
                    auto [lo, hi] = adj.range(s, pair_symbol(c, buf[0]));
                    for (std::size_t i = lo; i < hi; ++i) stepped.push_back(adj.out[s][i].second);
                    Word buf2(buf.begin() + 1, buf.end());
                    buf2.push_back(c);
                    for (State d : stepped) part.add_transition(src, c, get(d, buf2));
                }
            }
            part.finish();
            out = unite(out, part);
        }
    }
    return reduce(out);
}

namespace detail_rec {

/// Every pair strictly shrinks the word: the convolution never reaches a
/// letter with a live left component and a dead right component only if...
/// precisely: no accepted pair has |y| >= |x|, i.e. no accepted convolution
/// avoids (letter, pad) symbols entirely.
inline bool strictly_decreasing(const Transducer& r) {
    Nfa keep(r.base.alphabet);
    State s = keep.add_state();
    keep.add_initial(s);
    keep.add_final(s);
    for (Symbol p : r.base.alphabet) {
        auto parts = SymbolTable::instance().pair_parts(p);
        if (parts->second != SymbolTable::pad) keep.add_transition(s, p, s);
    }
    keep.finish();
    return is_empty(intersect(r.base, keep)).empty;
}

}  // namespace detail_rec

/// Certified-lower / capped-upper analysis of the infinite-chain set of a
/// transitive relation.
inline RecurrenceResult infinite_chain(const Transducer& r, const RecurrenceConfig& cfg = {}) {
    RecurrenceResult res;
    Nfa core = unite(rel_loops(r), self_cover(r));
    core = unite(core, bounded_tail_pump(r, cfg.tail_bound));
    res.lower = compact(unite(core, pre_image(r, core)));

    if (cfg.decreasing_shortcut && detail_rec::strictly_decreasing(r)) {
        if (!is_empty(res.lower).empty)
            throw SoundnessError("chain analysis: pump found in a shrinking relation");
        res.upper = empty_nfa(r.track);
        res.status = BoundStatus::Converged;
        res.iterations = 0;
        return res;
    }

    Nfa z = compact(rel_domain(r));
    res.status = BoundStatus::Bounded;
    for (std::uint32_t k = 0; k < cfg.max_gfp_iterations; ++k) {
        Nfa z2 = compact(pre_image(r, z));
        res.iterations = k + 1;
        if (equivalent(z2, z).equal) {
            res.status = BoundStatus::Converged;
            z = std::move(z2);
            break;
        }
        z = std::move(z2);
        if (cfg.max_gfp_states && z.num_states > cfg.max_gfp_states) break;
    }
    res.upper = z;
    if (!includes(res.upper, res.lower).included)
        throw SoundnessError("chain analysis: certified members escape the upper bound");
    return res;
}

inline ChainVerdict chain_verdict(const RecurrenceResult& res, const Word& x) {
    if (member(res.lower, x)) return ChainVerdict::Yes;
    if (res.status == BoundStatus::Converged && !member(res.upper, x)) return ChainVerdict::No;
    return ChainVerdict::Unknown;
}

/// Reconstruct an executable pump witness for a member of the lower bound.
inline std::optional<PumpWitness> chain_witness(const Transducer& r, const Word& x,
                                                const RecurrenceConfig& cfg = {},
                                                bool allow_lead = true) {
    if (member_pair(r, x, x)) {
        PumpWitness w;
        w.kind = PumpWitness::Kind::Loop;
        w.u = x;
        return w;
    }
    {
        std::map<State, Word> goods = detail_rec::self_cover_goods(r);
        for (State q : detail_rec::diag_reach(r, x)) {
            auto it = goods.find(q);
            if (it != goods.end()) {
                PumpWitness w;
                w.kind = PumpWitness::Kind::SelfCover;
                w.u = x;
                w.v = it->second;
                w.anchor = q;
                return w;
            }
        }
    }
    {
        std::map<State, std::vector<Word>> loops = detail_rec::diag_loop_words(r, cfg.tail_bound);
        for (std::size_t cut = 0; cut <= x.size(); ++cut) {
            Word u(x.begin(), x.begin() + static_cast<long>(cut));
            Word w_tail(x.begin() + static_cast<long>(cut), x.end());
            for (State q : detail_rec::diag_reach(r, u)) {
                auto it = loops.find(q);
                if (it == loops.end()) continue;
                for (const Word& v : it->second) {
                    if (detail_rec::accepts_shifted_tail(r, q, v, w_tail)) {
                        PumpWitness w;
                        w.kind = PumpWitness::Kind::BoundedTail;
                        w.u = u;
                        w.v = v;
                        w.w = w_tail;
                        w.anchor = q;
                        return w;
                    }
                }
            }
        }
    }
    if (allow_lead) {
        // one pre-image step into a pump
        Nfa succs = post_image(r, singleton_nfa(r.track, x));
        Nfa core = unite(rel_loops(r), self_cover(r));
        core = unite(core, bounded_tail_pump(r, cfg.tail_bound));
        auto hit = is_empty(intersect(succs, core));
        if (!hit.empty) {
            auto inner = chain_witness(r, *hit.witness, cfg, /*allow_lead=*/false);
            if (inner) {
                inner->leads.insert(inner->leads.begin(), x);
                return inner;
            }
        }
    }
    return std::nullopt;
}

/// The first n elements of the chain a witness describes; every consecutive
/// pair is checked against the relation and a failure aborts the run.
inline std::vector<Word> expand_witness(const Transducer& r, const PumpWitness& wit,
                                        std::size_t n) {
    if (n < 2) throw InputError("witness expansion needs at least two elements");
    std::vector<Word> chain(wit.leads);
    Word pump = wit.u;
    while (chain.size() < n) {
        switch (wit.kind) {
            case PumpWitness::Kind::Loop:
                chain.push_back(wit.u);
                break;
            case PumpWitness::Kind::SelfCover:
                chain.push_back(pump);
                pump.insert(pump.end(), wit.v.begin(), wit.v.end());
                break;
            case PumpWitness::Kind::BoundedTail: {
                Word elem = pump;
                elem.insert(elem.end(), wit.w.begin(), wit.w.end());
                chain.push_back(elem);
                pump.insert(pump.end(), wit.v.begin(), wit.v.end());
                break;
            }
        }
    }
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (!member_pair(r, chain[i], chain[i + 1]))
            throw SoundnessError("pump witness expansion left the relation at step " +
                                 std::to_string(i));
    return chain;
}

/// Recurrent reachability: states from which some path visits L(x)
/// infinitely often, given a transducer for the transitive step closure.
inline RecurrenceResult reach_inf(const Transducer& closure, const Nfa& x,
                                  const RecurrenceConfig& cfg = {}) {
    Transducer rx = rel_restrict(closure, x, x);
    RecurrenceResult inner = infinite_chain(rx, cfg);
    RecurrenceResult out;
    out.lower = compact(pre_image(closure, inner.lower));
    out.upper = compact(pre_image(closure, inner.upper));
    out.status = inner.status;
    out.iterations = inner.iterations;
    if (!includes(out.upper, out.lower).included)
        throw SoundnessError("recurrent reachability: lower bound escapes the upper bound");
    return out;
}

/// Witness for a member of reach_inf's lower bound: a step into the
/// restricted relation's pump.
inline std::optional<PumpWitness> reach_inf_witness(const Transducer& closure, const Nfa& x,
                                                    const Word& q, const RecurrenceConfig& cfg = {}) {
    Transducer rx = rel_restrict(closure, x, x);
    // the queried state may itself start a pump inside the restriction
    if (member(x, q)) {
        auto own = chain_witness(rx, q, cfg);
        if (own) return own;
    }
    Nfa succs = post_image(closure, singleton_nfa(closure.track, q));
    RecurrenceResult inner = infinite_chain(rx, cfg);
    auto hit = is_empty(intersect(succs, inner.lower));
    if (hit.empty) return std::nullopt;
    auto w = chain_witness(rx, *hit.witness, cfg);
    if (!w) return std::nullopt;
    w->leads.insert(w->leads.begin(), q);
    return w;
}

}  // namespace rmc
