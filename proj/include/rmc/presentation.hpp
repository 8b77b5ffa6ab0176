/* presentation.hpp -- automatic presentations of transition systems and the
 * product with a finite control system. */

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmc/nfa.hpp"
#include "rmc/symbols.hpp"
#include "rmc/transducer.hpp"

namespace rmc {

/// A domain automaton over the track alphabet plus one transducer per action.
/// After validation every relation is normalized and restricted to
/// domain × domain.
struct AutomaticPresentation {
    Alphabet actions;
    Nfa domain;
    std::map<Symbol, Transducer> rel;  // keyed by action symbol

    const Transducer& relation(Symbol action) const {
        auto it = rel.find(action);
        if (it == rel.end()) throw InputError("unknown action: " + symbol_name(action));
        return it->second;
    }
};

inline AutomaticPresentation validate_presentation(AutomaticPresentation raw) {
    if (raw.actions.empty()) throw InputError("presentation has an empty action set");
    for (Symbol a : raw.actions) {
        auto it = raw.rel.find(a);
        if (it == raw.rel.end())
            throw InputError("presentation lacks a relation for action " + symbol_name(a));
        if (!(it->second.track == raw.domain.alphabet))
            throw InputError("relation for action " + symbol_name(a) +
                             " disagrees with the domain alphabet");
    }
    for (const auto& [a, t] : raw.rel)
        if (!raw.actions.contains(a))
            throw InputError("relation for undeclared action " + symbol_name(a));
    AutomaticPresentation out;
    out.actions = raw.actions;
    out.domain = reduce(raw.domain);
    for (auto& [a, t] : raw.rel)
        out.rel.emplace(a, rel_restrict(t, out.domain, out.domain));
    return out;
}

/// ⋃_{a ∈ acts} rel(a); `acts` must be a non-empty subset of the actions.
inline Transducer union_step(const AutomaticPresentation& p, const std::vector<Symbol>& acts) {
    if (acts.empty()) throw InputError("union over an empty action subset");
    std::optional<Transducer> acc;
    for (Symbol a : acts) {
        const Transducer& t = p.relation(a);
        if (!acc)
            acc = t;
        else
            acc = rel_union(*acc, t);
    }
    return *acc;
}

inline std::vector<Symbol> all_actions(const AutomaticPresentation& p) {
    return p.actions.symbols();
}

/// Finite control system. Step sets may be nondeterministic and several
/// initial states are allowed; both show up naturally in automaton products.
struct FiniteSystem {
    struct Step {
        State src;
        Symbol action;
        State dst;
        auto operator<=>(const Step&) const = default;
    };

    State num_states = 0;
    std::vector<State> initials;
    std::vector<Step> steps;
    std::vector<std::string> state_names;  // optional; used for control symbols
    std::optional<std::vector<State>> one_weak_order;

    std::string name_of(State q) const {
        if (q < state_names.size() && !state_names[q].empty()) return state_names[q];
        return "f" + std::to_string(q);
    }
};

/// The product system: control state prepended as one fresh letter.
struct ProductPresentation {
    AutomaticPresentation pres;
    std::vector<Symbol> control_syms;  // per finite-system state

    /// Encoded product state q·w.
    Word encode(State q, const Word& w) const {
        Word out;
        out.reserve(w.size() + 1);
        out.push_back(control_syms.at(q));
        out.insert(out.end(), w.begin(), w.end());
        return out;
    }

    /// All product states whose control component lies in `controls`.
    Nfa states_with_control(const std::vector<State>& controls, const Nfa& base_domain) const {
        Nfa out(pres.domain.alphabet);
        State ini = out.add_state();
        out.add_initial(ini);
        State off = out.num_states;
        out.num_states += base_domain.num_states;
        for (State s : base_domain.finals) out.add_final(off + s);
        for (const auto& t : base_domain.transitions)
            out.add_transition(off + t.src, t.sym, off + t.dst);
        for (State q : controls)
            for (State s : base_domain.initials)
                out.add_transition(ini, control_syms.at(q), off + s);
        out.finish();
        return trim(out);
    }
};

/// The product of a finite system with a presentation:
/// q·w steps to q'·w' on action a iff (q, a, q') is a control step and
/// (w, w') lies in the action's relation. Control symbols are fresh when the
/// state names collide with existing track letters.
inline ProductPresentation finite_product(const FiniteSystem& f, const AutomaticPresentation& p) {
    ProductPresentation out;
    auto& table = SymbolTable::instance();
    for (State q = 0; q < f.num_states; ++q) {
        std::string nm = f.name_of(q);
        std::optional<Symbol> existing = table.find(nm);
        Symbol c;
        if (existing && p.domain.alphabet.contains(*existing))
            c = table.fresh(nm);
        else if (existing)
            c = *existing;
        else
            c = table.intern(nm);
        out.control_syms.push_back(c);
    }
    Alphabet ext = p.domain.alphabet.unioned(Alphabet(out.control_syms));

    // Domain: every control letter followed by a domain word.
    Nfa dom(ext);
    {
        State ini = dom.add_state();
        dom.add_initial(ini);
        State off = dom.num_states;
        dom.num_states += p.domain.num_states;
        for (State s : p.domain.finals) dom.add_final(off + s);
        for (const auto& t : p.domain.transitions) dom.add_transition(off + t.src, t.sym, off + t.dst);
        for (State q = 0; q < f.num_states; ++q)
            for (State s : p.domain.initials) dom.add_transition(ini, out.control_syms[q], off + s);
        dom.finish();
        dom = reduce(dom);
    }

    AutomaticPresentation pp;
    pp.actions = p.actions;
    pp.domain = dom;
    Alphabet pa = pair_alphabet(ext);
    for (Symbol a : p.actions) {
        const Transducer& base_rel = p.relation(a);
        Nfa rb(pa);
        State ini = rb.add_state();
        rb.add_initial(ini);
        State off = rb.num_states;
        rb.num_states += base_rel.base.num_states;
        for (State s : base_rel.base.finals) rb.add_final(off + s);
        for (const auto& t : base_rel.base.transitions)
            rb.add_transition(off + t.src, t.sym, off + t.dst);
        for (const auto& st : f.steps) {
            if (st.action != a) continue;
            Symbol c = pair_symbol(out.control_syms[st.src], out.control_syms[st.dst]);
            for (State s : base_rel.base.initials) rb.add_transition(ini, c, off + s);
        }
        rb.finish();
        pp.rel.emplace(a, normalize_convolutions(Transducer{ext, reduce(rb)}));
    }
    out.pres = std::move(pp);
    return out;
}

/// Encoded state of a presented system.
struct SystemState {
    Word word;
};

inline SystemState decode_state(const AutomaticPresentation& p, const std::string& text) {
    auto& table = SymbolTable::instance();
    Word w;
    std::string tok;
    std::vector<std::string> tokens;
    for (char ch : text) {
        if (ch == ' ' || ch == '\t') {
            if (!tok.empty()) tokens.push_back(tok);
            tok.clear();
        } else {
            tok.push_back(ch);
        }
    }
    if (!tok.empty()) tokens.push_back(tok);
    if (tokens.size() == 1) {
        // Allow per-character splitting when every character names a symbol.
        const std::string& t = tokens[0];
        auto whole = table.find(t);
        bool chars_ok = true;
        Word chars;
        for (char ch : t) {
            auto s = table.find(std::string(1, ch));
            if (!s || !p.domain.alphabet.contains(*s)) {
                chars_ok = false;
                break;
            }
            chars.push_back(*s);
        }
        if (whole && p.domain.alphabet.contains(*whole))
            w.push_back(*whole);
        else if (chars_ok)
            w = chars;
        else
            throw InputError("cannot resolve state text '" + text + "'");
    } else {
        for (const auto& t : tokens) {
            auto s = table.find(t);
            if (!s || !p.domain.alphabet.contains(*s))
                throw InputError("unknown state symbol '" + t + "'");
            w.push_back(*s);
        }
    }
    if (!member(p.domain, w))
        throw InputError("state '" + text + "' is outside the domain");
    return {w};
}

inline std::string encode_state(const SystemState& s) { return word_to_string(s.word); }

}  // namespace rmc
