/* closures.hpp -- per-class providers of step-closure transducers.
 *
 * A provider owns a presented system and computes transducers for the
 * transitive closure of any action-subset union of its step relations.
 * Capability flags say which constructions the class supports: subset
 * closures, products with finite control systems, products with 1-weak
 * control systems. Engines refuse pipelines whose capability is missing
 * rather than attempt them generically, because no total closure algorithm
 * exists for arbitrary presentations.
 */

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmc/graph.hpp"
#include "rmc/pds.hpp"
#include "rmc/presentation.hpp"
#include "rmc/transducer.hpp"

namespace rmc {

struct Capabilities {
    bool subset_closure = false;      // closures of every action-subset union
    bool finite_product = false;      // closed under products with finite systems
    bool one_weak_product = false;    // closed under products with 1-weak systems
};

struct ClosureResult {
    ClosureStatus status = ClosureStatus::Diverged;
    Transducer relation;
    std::uint32_t iterations = 0;
};

class ClosureProvider;

/// A provider for the product system together with the state encoding.
struct SystemProduct {
    std::unique_ptr<ClosureProvider> provider;
    ProductPresentation encoding;
};

class ClosureProvider {
public:
    virtual ~ClosureProvider() = default;

    virtual const AutomaticPresentation& presentation() const = 0;
    virtual Capabilities capabilities() const = 0;
    virtual std::string id() const = 0;
    virtual SystemProduct product(const FiniteSystem& f) const = 0;

    /// Closure of the union of the given actions' relations; memoized.
    const ClosureResult& closure(std::vector<Symbol> acts) {
        std::sort(acts.begin(), acts.end());
        acts.erase(std::unique(acts.begin(), acts.end()), acts.end());
        auto it = memo_.find(acts);
        if (it != memo_.end()) return it->second;
        auto t0 = std::chrono::steady_clock::now();
        ClosureResult res = compute_closure(acts);
        auto t1 = std::chrono::steady_clock::now();
        seconds_ += std::chrono::duration<double>(t1 - t0).count();
        return memo_.emplace(std::move(acts), std::move(res)).first->second;
    }

    /// Accumulated wall-clock time spent inside closure computations.
    double seconds() const { return seconds_; }

protected:
    virtual ClosureResult compute_closure(const std::vector<Symbol>& acts) = 0;

private:
    std::map<std::vector<Symbol>, ClosureResult> memo_;
    double seconds_ = 0;
};

namespace detail_prov {

inline bool domain_is_finite(const Nfa& domain) {
    Nfa t = trim(domain);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (const auto& tr : t.transitions) edges.emplace_back(tr.src, tr.dst);
    return graph::topological_index(t.num_states, edges).has_value();
}

}  // namespace detail_prov

/// Baseline provider for systems with a finite domain: the closure is an
/// explicit graph closure. All capabilities hold.
class FiniteProvider final : public ClosureProvider {
public:
    explicit FiniteProvider(AutomaticPresentation pres)
        : pres_(validate_presentation(std::move(pres))) {
        if (!detail_prov::domain_is_finite(pres_.domain))
            throw InputError("finite provider needs a finite domain language");
    }

    const AutomaticPresentation& presentation() const override { return pres_; }
    Capabilities capabilities() const override { return {true, true, true}; }
    std::string id() const override { return "finite"; }

    SystemProduct product(const FiniteSystem& f) const override {
        ProductPresentation pp = finite_product(f, pres_);
        SystemProduct out;
        out.provider = std::make_unique<FiniteProvider>(pp.pres);
        out.encoding = std::move(pp);
        return out;
    }

protected:
    ClosureResult compute_closure(const std::vector<Symbol>& acts) override {
        std::vector<Word> states = enumerate_accepted(pres_.domain, trim(pres_.domain).num_states);
        const std::size_t n = states.size();
        std::vector<std::vector<char>> step(n, std::vector<char>(n, 0));
        for (Symbol a : acts) {
            const Transducer& r = pres_.relation(a);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (!step[i][j] && member_pair(r, states[i], states[j])) step[i][j] = 1;
        }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                if (step[i][k])
                    for (std::size_t j = 0; j < n; ++j)
                        if (step[k][j]) step[i][j] = 1;
        Nfa base = empty_nfa(pair_alphabet(pres_.domain.alphabet));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (step[i][j])
                    base = unite(base, singleton_nfa(base.alphabet, convolve(states[i], states[j])));
        ClosureResult res;
        res.status = ClosureStatus::Converged;
        res.relation = normalize_convolutions({pres_.domain.alphabet, reduce(base)});
        res.iterations = 1;
        return res;
    }

private:
    AutomaticPresentation pres_;
};

/// Generic semi-algorithm provider: iterates relation composition with an
/// exact equivalence test; divergence is surfaced, never truncated silently.
/// Capability flags are whatever the caller asserts about the class.
class GenericProvider final : public ClosureProvider {
public:
    GenericProvider(AutomaticPresentation pres, std::uint32_t max_iterations = 64,
                    Capabilities caps = {})
        : pres_(validate_presentation(std::move(pres))),
          max_iterations_(max_iterations),
          caps_(caps) {}

    const AutomaticPresentation& presentation() const override { return pres_; }
    Capabilities capabilities() const override { return caps_; }
    std::string id() const override { return "generic"; }

    SystemProduct product(const FiniteSystem& f) const override {
        ProductPresentation pp = finite_product(f, pres_);
        SystemProduct out;
        out.provider = std::make_unique<GenericProvider>(pp.pres, max_iterations_, caps_);
        out.encoding = std::move(pp);
        return out;
    }

protected:
    ClosureResult compute_closure(const std::vector<Symbol>& acts) override {
        Transducer step = union_step(pres_, acts);
        ClosureOutcome out = transitive_closure_semi(step, max_iterations_);
        return {out.status, std::move(out.relation), out.iterations};
    }

private:
    AutomaticPresentation pres_;
    std::uint32_t max_iterations_;
    Capabilities caps_;
};

/// Pushdown systems: polynomial closures by saturation; closed under finite
/// products (the product of the control systems is a pushdown system again).
class PdsProvider final : public ClosureProvider {
public:
    explicit PdsProvider(Pds p) : pds_(validate_pds(std::move(p))) {
        pres_ = validate_presentation(pds_to_presentation(pds_));
        for (Symbol c : pds_.controls) expansion_.emplace(c, Word{c});
    }

    PdsProvider(Pds p, AutomaticPresentation pres, std::map<Symbol, Word> expansion)
        : pds_(std::move(p)), pres_(std::move(pres)), expansion_(std::move(expansion)) {}

    const AutomaticPresentation& presentation() const override { return pres_; }
    Capabilities capabilities() const override { return {true, true, true}; }
    std::string id() const override { return "pds"; }
    const Pds& pds() const { return pds_; }

    SystemProduct product(const FiniteSystem& f) const override {
        ProductPresentation pp = finite_product(f, pres_);
        // fused product controls; configs of the fused system expand to the
        // product encoding (control prefix per layer)
        Pds fused;
        fused.actions = pds_.actions;
        fused.stack = pds_.stack;
        std::map<Symbol, Word> expansion;
        std::map<std::pair<State, Symbol>, Symbol> fuse;
        std::vector<Symbol> controls;
        for (State i = 0; i < f.num_states; ++i)
            for (Symbol q : pds_.controls) {
                std::string name =
                    symbol_name(pp.control_syms[i]) + "." + symbol_name(q);
                auto existing = SymbolTable::instance().find(name);
                Symbol s;
                if (!existing)
                    s = SymbolTable::instance().intern(name);
                else if (pds_.stack.contains(*existing) || pds_.controls.contains(*existing))
                    s = SymbolTable::instance().fresh(name);
                else
                    s = *existing;
                fuse.emplace(std::make_pair(i, q), s);
                controls.push_back(s);
                Word exp{pp.control_syms[i]};
                const Word& inner = expansion_.at(q);
                exp.insert(exp.end(), inner.begin(), inner.end());
                expansion.emplace(s, std::move(exp));
            }
        fused.controls = Alphabet(controls);
        for (const auto& st : f.steps)
            for (const auto& r : pds_.rules) {
                if (r.action != st.action) continue;
                fused.rules.push_back({fuse.at({st.src, r.control}), r.top, r.action,
                                       fuse.at({st.dst, r.next_control}), r.push});
            }
        SystemProduct out;
        out.provider =
            std::make_unique<PdsProvider>(std::move(fused), pp.pres, std::move(expansion));
        out.encoding = std::move(pp);
        return out;
    }

protected:
    ClosureResult compute_closure(const std::vector<Symbol>& acts) override {
        Transducer fused = pds_closure(pds_, acts);
        ClosureResult res;
        res.status = ClosureStatus::Converged;
        res.iterations = 1;
        res.relation = split_controls(fused);
        return res;
    }

private:
    /// Rewrite first letters (c, c') of the fused closure into the expanded
    /// control prefixes of the presented encoding.
    Transducer split_controls(const Transducer& fused) const {
        bool trivial = true;
        for (const auto& [c, exp] : expansion_)
            if (!(exp.size() == 1 && exp[0] == c)) trivial = false;
        if (trivial) return fused;

        Alphabet track = pres_.domain.alphabet;
        Alphabet pa = pair_alphabet(track);
        Nfa out(pa);
        State ini = out.add_state();
        out.add_initial(ini);
        State off = out.num_states;
        out.num_states += fused.base.num_states;
        for (State s : fused.base.finals) out.add_final(off + s);
        for (const auto& t : fused.base.transitions) {
            auto parts = SymbolTable::instance().pair_parts(t.sym);
            if (!expansion_.count(parts->first)) {
                out.add_transition(off + t.src, t.sym, off + t.dst);
            }
        }
        // initial control-pair transitions expand into letter chains
        for (const auto& t : fused.base.transitions) {
            if (!fused.base.is_initial(t.src)) continue;
            auto parts = SymbolTable::instance().pair_parts(t.sym);
            auto li = expansion_.find(parts->first);
            auto ri = expansion_.find(parts->second);
            if (li == expansion_.end() || ri == expansion_.end()) continue;
            const Word& lw = li->second;
            const Word& rw = ri->second;
            State cur = ini;
            for (std::size_t k = 0; k < lw.size(); ++k) {
                State nxt = (k + 1 == lw.size()) ? off + t.dst : out.add_state();
                out.add_transition(cur, pair_symbol(lw[k], rw[k]), nxt);
                cur = nxt;
            }
        }
        out.finish();
        return normalize_convolutions({track, reduce(out)});
    }

    Pds pds_;
    AutomaticPresentation pres_;
    std::map<Symbol, Word> expansion_;  // control symbol -> encoded prefix
};

inline std::unique_ptr<ClosureProvider> provider_finite(AutomaticPresentation pres) {
    return std::make_unique<FiniteProvider>(std::move(pres));
}

inline std::unique_ptr<ClosureProvider> provider_generic(AutomaticPresentation pres,
                                                         std::uint32_t max_iterations = 64,
                                                         Capabilities caps = {}) {
    return std::make_unique<GenericProvider>(std::move(pres), max_iterations, caps);
}

inline std::unique_ptr<ClosureProvider> provider_pds(Pds p) {
    return std::make_unique<PdsProvider>(std::move(p));
}

}  // namespace rmc
