/* transducer.hpp -- synchronized letter-to-letter transducers.
 *
 * A Transducer is an Nfa over the padded pair alphabet of a track alphabet.
 * The recognized binary relation is { (x, y) : x ⊗ y ∈ L(base) } where x ⊗ y
 * pads the shorter word with the reserved pad symbol. Every relation-producing
 * operation normalizes its result so accepted words are valid convolutions:
 * once a track reads a pad it reads pads forever.
 */

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "rmc/nfa.hpp"
#include "rmc/symbols.hpp"

namespace rmc {

struct Transducer {
    Alphabet track;  // the common track alphabet (pads excluded)
    Nfa base;        // over pair_alphabet(track)

    Transducer() = default;
    Transducer(Alphabet track_alpha, Nfa base_nfa)
        : track(std::move(track_alpha)), base(std::move(base_nfa)) {}
};

inline constexpr Symbol pad_symbol() { return SymbolTable::pad; }

/// The convolution x ⊗ y: the shorter word is padded on its track.
inline Word convolve(const Word& x, const Word& y) {
    Word out;
    std::size_t n = std::max(x.size(), y.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Symbol l = i < x.size() ? x[i] : pad_symbol();
        Symbol r = i < y.size() ? y[i] : pad_symbol();
        out.push_back(pair_symbol(l, r));
    }
    return out;
}

/// Inverse of convolve on valid convolutions.
inline std::pair<Word, Word> deconvolve(const Word& pw) {
    Word x, y;
    for (Symbol s : pw) {
        auto parts = SymbolTable::instance().pair_parts(s);
        if (!parts) throw InputError("not a pair symbol: " + symbol_name(s));
        if (parts->first != pad_symbol()) x.push_back(parts->first);
        if (parts->second != pad_symbol()) y.push_back(parts->second);
    }
    return {x, y};
}

/// Three-state monitor accepting exactly the valid convolutions.
inline Nfa convolution_monitor(const Alphabet& track) {
    Alphabet pa = pair_alphabet(track);
    Nfa m(pa);
    State live = m.add_state();   // both tracks alive
    State ldead = m.add_state();  // left track finished
    State rdead = m.add_state();  // right track finished
    m.add_initial(live);
    m.add_final(live);
    m.add_final(ldead);
    m.add_final(rdead);
    for (Symbol l : track)
        for (Symbol r : track) m.add_transition(live, pair_symbol(l, r), live);
    for (Symbol r : track) {
        m.add_transition(live, pair_symbol(pad_symbol(), r), ldead);
        m.add_transition(ldead, pair_symbol(pad_symbol(), r), ldead);
    }
    for (Symbol l : track) {
        m.add_transition(live, pair_symbol(l, pad_symbol()), rdead);
        m.add_transition(rdead, pair_symbol(l, pad_symbol()), rdead);
    }
    m.finish();
    return m;
}

/// Drop every accepted word that is not a valid convolution. The recognized
/// relation is unchanged.
inline Transducer normalize_convolutions(const Transducer& t) {
    Nfa base = reduce(intersect(t.base, convolution_monitor(t.track)));
    return {t.track, base};
}

inline Transducer empty_relation(const Alphabet& track) {
    return {track, empty_nfa(pair_alphabet(track))};
}

/// The diagonal relation { (w, w) : w ∈ L(l) }.
inline Transducer identity_on(const Nfa& l) {
    Alphabet pa = pair_alphabet(l.alphabet);
    Nfa base = relabel(l, pa, [](Symbol s) { return pair_symbol(s, s); });
    return {l.alphabet, reduce(base)};
}

namespace detail {

/// Pair-words whose left projection lies in L(a) (and whose left track is
/// well padded). The right components are unconstrained.
inline Nfa lift_left(const Nfa& a) {
    Alphabet pa = pair_alphabet(a.alphabet);
    Nfa out(pa);
    out.num_states = a.num_states;
    State sink = out.add_state();
    out.initials = a.initials;
    out.finals = a.finals;
    out.add_final(sink);
    for (const auto& t : a.transitions) {
        out.add_transition(t.src, pair_symbol(t.sym, pad_symbol()), t.dst);
        for (Symbol r : a.alphabet) out.add_transition(t.src, pair_symbol(t.sym, r), t.dst);
    }
    for (State f : a.finals)
        for (Symbol r : a.alphabet) out.add_transition(f, pair_symbol(pad_symbol(), r), sink);
    for (Symbol r : a.alphabet) out.add_transition(sink, pair_symbol(pad_symbol(), r), sink);
    out.finish();
    return out;
}

inline Nfa lift_right(const Nfa& a) {
    Alphabet pa = pair_alphabet(a.alphabet);
    Nfa out(pa);
    out.num_states = a.num_states;
    State sink = out.add_state();
    out.initials = a.initials;
    out.finals = a.finals;
    out.add_final(sink);
    for (const auto& t : a.transitions) {
        out.add_transition(t.src, pair_symbol(pad_symbol(), t.sym), t.dst);
        for (Symbol l : a.alphabet) out.add_transition(t.src, pair_symbol(l, t.sym), t.dst);
    }
    for (State f : a.finals)
        for (Symbol l : a.alphabet) out.add_transition(f, pair_symbol(l, pad_symbol()), sink);
    for (Symbol l : a.alphabet) out.add_transition(sink, pair_symbol(l, pad_symbol()), sink);
    out.finish();
    return out;
}

}  // namespace detail

inline void require_same_track(const Transducer& r, const Transducer& s, const char* what) {
    if (!(r.track == s.track)) throw InputError(std::string(what) + ": track alphabet mismatch");
}

inline bool member_pair(const Transducer& r, const Word& x, const Word& y) {
    for (Symbol s : x)
        if (!r.track.contains(s)) throw InputError("left word leaves the track alphabet");
    for (Symbol s : y)
        if (!r.track.contains(s)) throw InputError("right word leaves the track alphabet");
    if (x.empty() && y.empty()) {
        for (State q : r.base.initials)
            if (r.base.is_final(q)) return true;
        return false;
    }
    return member(r.base, convolve(x, y));
}

inline Transducer rel_union(const Transducer& r, const Transducer& s) {
    require_same_track(r, s, "relation union");
    return normalize_convolutions({r.track, unite(r.base, s.base)});
}

inline Transducer rel_intersect(const Transducer& r, const Transducer& s) {
    require_same_track(r, s, "relation intersection");
    return normalize_convolutions({r.track, intersect(r.base, s.base)});
}

/// { (y, x) : (x, y) ∈ r }.
inline Transducer rel_inverse(const Transducer& r) {
    Nfa base = relabel(r.base, r.base.alphabet, [](Symbol s) {
        auto parts = SymbolTable::instance().pair_parts(s);
        return pair_symbol(parts->second, parts->first);
    });
    return normalize_convolutions({r.track, base});
}

/// r restricted to L(a) × L(b).
inline Transducer rel_restrict(const Transducer& r, const Nfa& a, const Nfa& b) {
    if (!(a.alphabet == r.track) || !(b.alphabet == r.track))
        throw InputError("restrict: track alphabet mismatch");
    Nfa base = intersect(r.base, detail::lift_left(a));
    base = intersect(base, detail::lift_right(b));
    return normalize_convolutions({r.track, base});
}

namespace detail {

/// Append an explicit (pad,pad) tail loop behind the final states, so padded
/// words of a common length can be matched track-by-track during composition.
inline Nfa pad_extend(const Nfa& base, const Alphabet& ext_alpha, Symbol pp) {
    Nfa out = with_alphabet(base, ext_alpha);
    State pend = out.add_state();
    for (State f : base.finals) out.add_transition(f, pp, pend);
    out.add_transition(pend, pp, pend);
    out.add_final(pend);
    out.finish();
    return out;
}

}  // namespace detail

/// Relation composition { (x, z) : ∃y. (x, y) ∈ r ∧ (y, z) ∈ s }, built as a
/// product synchronized on the middle track. Both inputs are pad-extended so
/// the middle word may outlive either outer word; the temporary all-pad
/// letter is stripped from the result before normalization.
inline Transducer compose(const Transducer& r, const Transducer& s) {
    require_same_track(r, s, "compose");
    const Symbol pp = pair_symbol(pad_symbol(), pad_symbol());
    Alphabet ext = r.base.alphabet.unioned(Alphabet({pp}));
    Nfa re = detail::pad_extend(r.base, ext, pp);
    Nfa se = detail::pad_extend(s.base, ext, pp);

    // Index r-side transitions by middle (right) component, s-side by middle
    // (left) component.
    std::vector<std::vector<std::tuple<Symbol, Symbol, State>>> rout(re.num_states),
        sout(se.num_states);
    for (const auto& t : re.transitions) {
        auto parts = SymbolTable::instance().pair_parts(t.sym);
        rout[t.src].emplace_back(parts->second, parts->first, t.dst);  // keyed by y
    }
    for (const auto& t : se.transitions) {
        auto parts = SymbolTable::instance().pair_parts(t.sym);
        sout[t.src].emplace_back(parts->first, parts->second, t.dst);  // keyed by y
    }
    for (auto& v : rout) std::sort(v.begin(), v.end());
    for (auto& v : sout) std::sort(v.begin(), v.end());

    Nfa prod(ext);
    std::unordered_map<std::uint64_t, State> ids;
    std::deque<std::pair<State, State>> todo;
    auto key = [](State x, State y) { return (std::uint64_t(x) << 32) | y; };
    auto get = [&](State x, State y) {
        auto it = ids.find(key(x, y));
        if (it != ids.end()) return it->second;
        State q = prod.add_state();
        ids.emplace(key(x, y), q);
        todo.emplace_back(x, y);
        if (re.is_final(x) && se.is_final(y)) prod.add_final(q);
        return q;
    };
    for (State x : re.initials)
        for (State y : se.initials) prod.add_initial(get(x, y));
    while (!todo.empty()) {
        auto [x, y] = todo.front();
        todo.pop_front();
        State q = ids[key(x, y)];
        const auto& ox = rout[x];
        const auto& oy = sout[y];
        std::size_t i = 0, j = 0;
        while (i < ox.size() && j < oy.size()) {
            Symbol my = std::get<0>(ox[i]);
            Symbol ny = std::get<0>(oy[j]);
            if (my < ny) { ++i; continue; }
            if (ny < my) { ++j; continue; }
            std::size_t i2 = i, j2 = j;
            while (i2 < ox.size() && std::get<0>(ox[i2]) == my) ++i2;
            while (j2 < oy.size() && std::get<0>(oy[j2]) == my) ++j2;
            for (std::size_t p = i; p < i2; ++p)
                for (std::size_t q2 = j; q2 < j2; ++q2) {
                    Symbol xz = pair_symbol(std::get<1>(ox[p]), std::get<1>(oy[q2]));
                    prod.add_transition(q, xz, get(std::get<2>(ox[p]), std::get<2>(oy[q2])));
                }
            i = i2;
            j = j2;
        }
    }
    prod.finish();

    // Strip the all-pad tail: states reaching a final through pp-only moves
    // become final, then pp transitions disappear.
    {
        std::vector<std::vector<State>> pp_pred(prod.num_states);
        for (const auto& t : prod.transitions)
            if (t.sym == pp) pp_pred[t.dst].push_back(t.src);
        std::vector<char> good(prod.num_states, 0);
        std::deque<State> q2(prod.finals.begin(), prod.finals.end());
        for (State f : prod.finals) good[f] = 1;
        while (!q2.empty()) {
            State s2 = q2.front();
            q2.pop_front();
            for (State p : pp_pred[s2])
                if (!good[p]) {
                    good[p] = 1;
                    q2.push_back(p);
                }
        }
        Nfa stripped(r.base.alphabet);
        stripped.num_states = prod.num_states;
        stripped.initials = prod.initials;
        for (State s2 = 0; s2 < prod.num_states; ++s2)
            if (good[s2]) stripped.add_final(s2);
        for (const auto& t : prod.transitions)
            if (t.sym != pp) stripped.add_transition(t.src, t.sym, t.dst);
        stripped.finish();
        prod = std::move(stripped);
    }
    return normalize_convolutions({r.track, prod});
}

namespace detail {

/// Project a (normalized) pair automaton onto one track: suffix pads become
/// accepting tails, pad letters on the kept track disappear.
inline Nfa project(const Nfa& base, const Alphabet& track, bool keep_left) {
    // Final states reachable through only letters whose kept component is pad.
    std::vector<std::vector<State>> tail_pred(base.num_states);
    for (const auto& t : base.transitions) {
        auto parts = SymbolTable::instance().pair_parts(t.sym);
        Symbol kept = keep_left ? parts->first : parts->second;
        if (kept == SymbolTable::pad) tail_pred[t.dst].push_back(t.src);
    }
    std::vector<char> tail_final(base.num_states, 0);
    std::deque<State> q(base.finals.begin(), base.finals.end());
    for (State f : base.finals) tail_final[f] = 1;
    while (!q.empty()) {
        State s = q.front();
        q.pop_front();
        for (State p : tail_pred[s])
            if (!tail_final[p]) {
                tail_final[p] = 1;
                q.push_back(p);
            }
    }
    Nfa out(track);
    out.num_states = base.num_states;
    out.initials = base.initials;
    for (State s = 0; s < base.num_states; ++s)
        if (tail_final[s]) out.add_final(s);
    for (const auto& t : base.transitions) {
        auto parts = SymbolTable::instance().pair_parts(t.sym);
        Symbol kept = keep_left ? parts->first : parts->second;
        if (kept != SymbolTable::pad) out.add_transition(t.src, kept, t.dst);
    }
    out.finish();
    return reduce(out);
}

}  // namespace detail

/// { u : ∃v ∈ L(x). (u, v) ∈ r }.
inline Nfa pre_image(const Transducer& r, const Nfa& x) {
    if (!(x.alphabet == r.track)) throw InputError("pre_image: track alphabet mismatch");
    Nfa constrained = intersect(r.base, detail::lift_right(x));
    return detail::project(constrained, r.track, /*keep_left=*/true);
}

/// { v : ∃u ∈ L(x). (u, v) ∈ r }.
inline Nfa post_image(const Transducer& r, const Nfa& x) {
    if (!(x.alphabet == r.track)) throw InputError("post_image: track alphabet mismatch");
    Nfa constrained = intersect(r.base, detail::lift_left(x));
    return detail::project(constrained, r.track, /*keep_left=*/false);
}

/// Left projection of the relation (the set of states with any successor).
inline Nfa rel_domain(const Transducer& r) {
    return detail::project(r.base, r.track, /*keep_left=*/true);
}

inline Nfa rel_range(const Transducer& r) {
    return detail::project(r.base, r.track, /*keep_left=*/false);
}

inline bool rel_equal(const Transducer& r, const Transducer& s) {
    require_same_track(r, s, "relation equivalence");
    return equivalent(r.base, s.base).equal;
}

enum class ClosureStatus { Converged, Diverged };

struct ClosureOutcome {
    ClosureStatus status = ClosureStatus::Diverged;
    Transducer relation;   // exact closure when Converged, union of iterates otherwise
    std::uint32_t iterations = 0;
};

/// Iterate C₀ = r, C_{k+1} = r ∪ (r ∘ C_k) to the transitive closure, with an
/// exact equivalence test as the fixpoint check. No total method exists for
/// this, so hitting the bound is an explicit Diverged status, not an error.
inline ClosureOutcome transitive_closure_semi(const Transducer& r, std::uint32_t max_iterations) {
    if (max_iterations < 1) throw InputError("transitive closure: iteration bound must be >= 1");
    Transducer cur = normalize_convolutions(r);
    for (std::uint32_t k = 0; k < max_iterations; ++k) {
        Transducer next = rel_union(cur, compose(r, cur));
        next.base = reduce(next.base);
        if (rel_equal(next, cur)) return {ClosureStatus::Converged, std::move(next), k + 1};
        cur = std::move(next);
    }
    return {ClosureStatus::Diverged, std::move(cur), max_iterations};
}

}  // namespace rmc
