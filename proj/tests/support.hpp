/* support.hpp -- shared helpers for the test suites: a portable seeded RNG,
 * word enumeration, and oracles kept independent of the library's own
 * algorithm paths. */

#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "rmc/nfa.hpp"
#include "rmc/symbols.hpp"

namespace rmctest {

/// splitmix64: bit-reproducible across platforms, unlike std distributions.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint32_t below(std::uint32_t n) { return static_cast<std::uint32_t>(next() % n); }

    bool chance(std::uint32_t num, std::uint32_t den) { return below(den) < num; }
};

/// All words over `alpha` of length 0..maxlen, shortlex.
inline std::vector<rmc::Word> all_words(const rmc::Alphabet& alpha, std::size_t maxlen) {
    std::vector<rmc::Word> out{{}};
    std::size_t lo = 0;
    for (std::size_t len = 1; len <= maxlen; ++len) {
        std::size_t hi = out.size();
        for (std::size_t i = lo; i < hi; ++i)
            for (rmc::Symbol s : alpha) {
                rmc::Word w = out[i];
                w.push_back(s);
                out.push_back(std::move(w));
            }
        lo = hi;
    }
    return out;
}

/// Membership decided by memoized DFS over (state, position); deliberately a
/// different algorithm from the library's subset stepping.
inline bool oracle_member(const rmc::Nfa& a, const rmc::Word& w) {
    std::vector<std::vector<std::pair<rmc::Symbol, rmc::State>>> out(a.num_states);
    for (const auto& t : a.transitions) out[t.src].emplace_back(t.sym, t.dst);
    std::set<std::pair<rmc::State, std::size_t>> visited;
    std::function<bool(rmc::State, std::size_t)> go = [&](rmc::State q, std::size_t pos) {
        if (!visited.insert({q, pos}).second) return false;
        if (pos == w.size()) return a.is_final(q);
        for (const auto& [sym, dst] : out[q])
            if (sym == w[pos] && go(dst, pos + 1)) return true;
        return false;
    };
    for (rmc::State q : a.initials)
        if (go(q, 0)) return true;
    return false;
}

inline rmc::Nfa random_nfa(Rng& rng, const rmc::Alphabet& alpha, std::uint32_t n_states,
                           std::uint32_t n_transitions) {
    rmc::Nfa a(alpha);
    for (std::uint32_t i = 0; i < n_states; ++i) a.add_state();
    a.add_initial(rng.below(n_states));
    std::uint32_t n_final = 1 + rng.below(n_states);
    for (std::uint32_t i = 0; i < n_final; ++i) a.add_final(rng.below(n_states));
    const auto& syms = alpha.symbols();
    for (std::uint32_t i = 0; i < n_transitions; ++i)
        a.add_transition(rng.below(n_states), syms[rng.below(static_cast<std::uint32_t>(syms.size()))],
                         rng.below(n_states));
    a.finish();
    return a;
}

inline rmc::Word random_word(Rng& rng, const rmc::Alphabet& alpha, std::size_t maxlen) {
    std::size_t len = rng.below(static_cast<std::uint32_t>(maxlen + 1));
    rmc::Word w;
    const auto& syms = alpha.symbols();
    for (std::size_t i = 0; i < len; ++i)
        w.push_back(syms[rng.below(static_cast<std::uint32_t>(syms.size()))]);
    return w;
}

}  // namespace rmctest
