/* pds.hpp -- pushdown systems: word encoding, saturation-based reachability,
 * and the step-closure transducer.
 *
 * Configurations encode as control·stack with the stack written bottom to
 * top (the top is the rightmost letter). The pre-star and post-star
 * saturations work on P-automata with one entry state per control, reading
 * stacks top-first; the public interfaces speak the bottom-first word
 * encoding throughout.
 *
 * The closure transducer decomposes any run at the last configuration of
 * minimum stack height: below that pivot a common prefix z survives on both
 * sides, the left word ends with a stack u that drains to the pivot symbol,
 * and the right word ends with a stack v the pivot grows into. Pop languages
 * come from pre* of single-symbol targets, push languages from post* of
 * single-symbol (or rule right-hand side) sources.
 */

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rmc/nfa.hpp"
#include "rmc/presentation.hpp"
#include "rmc/symbols.hpp"
#include "rmc/transducer.hpp"

namespace rmc {

struct PdsRule {
    Symbol control, top, action, next_control;
    Word push;  // bottom-first; empty = pop
};

struct Pds {
    Alphabet actions, stack, controls;
    std::vector<PdsRule> rules;

    Alphabet config_alphabet() const { return controls.unioned(stack); }
};

inline Pds validate_pds(Pds p) {
    if (p.actions.empty()) throw InputError("pushdown system without actions");
    if (p.stack.empty() || p.controls.empty())
        throw InputError("pushdown system needs stack symbols and controls");
    for (Symbol c : p.controls)
        if (p.stack.contains(c))
            throw InputError("control and stack symbol collide: " + symbol_name(c));
    for (const auto& r : p.rules) {
        if (!p.controls.contains(r.control) || !p.controls.contains(r.next_control))
            throw InputError("rule references an undeclared control");
        if (!p.stack.contains(r.top)) throw InputError("rule references an undeclared stack symbol");
        if (!p.actions.contains(r.action)) throw InputError("rule references an undeclared action");
        for (Symbol s : r.push)
            if (!p.stack.contains(s)) throw InputError("rule pushes an undeclared stack symbol");
    }
    return p;
}

inline Word pds_config(Symbol control, const Word& stack) {
    Word out{control};
    out.insert(out.end(), stack.begin(), stack.end());
    return out;
}

/// One-step successors of an encoded configuration under the given actions.
inline std::vector<std::pair<Symbol, Word>> pds_step(const Pds& p, const Word& config,
                                                     const std::vector<Symbol>& acts) {
    std::vector<std::pair<Symbol, Word>> out;
    if (config.size() < 2) return out;  // empty stack: no rule applies
    Symbol control = config[0];
    Symbol top = config.back();
    for (const auto& r : p.rules) {
        if (r.control != control || r.top != top) continue;
        if (std::find(acts.begin(), acts.end(), r.action) == acts.end()) continue;
        Word next(config.begin(), config.end() - 1);
        next[0] = r.next_control;
        next.insert(next.end(), r.push.begin(), r.push.end());
        out.emplace_back(r.action, std::move(next));
    }
    return out;
}

namespace detail_pds {

/// Rules with pushes longer than two are split through fresh transient
/// controls, each pushing one further symbol on top of the kept one; runs of
/// the split system between original controls match the original runs.
struct NormalizedRules {
    std::vector<PdsRule> rules;
    std::vector<Symbol> all_controls;  // originals first, then transients
};

inline NormalizedRules normalize_rules(const Pds& p, const std::vector<Symbol>& acts) {
    NormalizedRules out;
    out.all_controls = p.controls.symbols();
    for (const auto& r : p.rules) {
        if (std::find(acts.begin(), acts.end(), r.action) == acts.end()) continue;
        if (r.push.size() <= 2) {
            out.rules.push_back(r);
            continue;
        }
        // (q, yσ) -> (m1, yγ1γ2) -> (m2, yγ1γ2γ3) -> ... -> (q', yγ1..γk)
        Symbol src = r.control;
        for (std::size_t i = 0; i + 2 <= r.push.size(); ++i) {
            bool last = i + 2 == r.push.size();
            Symbol dst = last ? r.next_control
                              : SymbolTable::instance().fresh(symbol_name(r.control) + "+");
            Symbol top = (i == 0) ? r.top : r.push[i];
            out.rules.push_back({src, top, r.action, dst, {r.push[i], r.push[i + 1]}});
            if (!last) out.all_controls.push_back(dst);
            src = dst;
        }
    }
    return out;
}

/// P-automaton: entry state per control, reading stacks top-first.
struct PAut {
    std::map<Symbol, State> entry;
    State n = 0;
    std::set<std::tuple<State, Symbol, State>> trans;
    std::set<std::pair<State, State>> eps;
    std::vector<char> final_;

    State add_state() {
        final_.push_back(0);
        return n++;
    }

    std::vector<State> eps_closure(std::vector<State> set) const {
        std::deque<State> q(set.begin(), set.end());
        std::set<State> seen(set.begin(), set.end());
        while (!q.empty()) {
            State s = q.front();
            q.pop_front();
            for (const auto& [a, b] : eps)
                if (a == s && !seen.count(b)) {
                    seen.insert(b);
                    q.push_back(b);
                }
        }
        return {seen.begin(), seen.end()};
    }

    std::vector<State> step(const std::vector<State>& set, Symbol sym) const {
        std::set<State> out;
        for (const auto& [s, a, t] : trans)
            if (a == sym && std::binary_search(set.begin(), set.end(), s)) out.insert(t);
        return {out.begin(), out.end()};
    }

    std::vector<State> read(State from, const Word& topfirst) const {
        std::vector<State> cur = eps_closure({from});
        std::sort(cur.begin(), cur.end());
        for (Symbol s : topfirst) {
            cur = eps_closure(step(cur, s));
            std::sort(cur.begin(), cur.end());
            if (cur.empty()) break;
        }
        return cur;
    }

    /// Bottom-first stack language read from `from` to the final states.
    Nfa stack_language(const Alphabet& gamma, State from) const {
        if (!eps.empty()) throw SoundnessError("stack language read before epsilon elimination");
        Nfa top_first(gamma);
        top_first.num_states = n;
        top_first.add_initial(from);
        for (State s = 0; s < n; ++s)
            if (final_[s]) top_first.add_final(s);
        for (const auto& [s, a, t] : trans) top_first.add_transition(s, a, t);
        top_first.finish();
        return reduce(reverse(top_first));
    }

    /// Remove epsilon transitions (lift successor edges and finals).
    void eliminate_eps() {
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<std::tuple<State, Symbol, State>> extra;
            for (const auto& [s, t] : eps) {
                if (final_[t] && !final_[s]) {
                    final_[s] = 1;
                    changed = true;
                }
                for (const auto& [u, a, v] : trans)
                    if (u == t && !trans.count({s, a, v})) extra.emplace_back(s, a, v);
                for (const auto& [u, v] : eps)
                    if (u == t && s != v && !eps.count({s, v})) {
                        eps.emplace(s, v);
                        changed = true;
                    }
            }
            for (const auto& e : extra) {
                trans.insert(e);
                changed = true;
            }
        }
        eps.clear();
    }
};

inline PAut make_entries(const std::vector<Symbol>& controls) {
    PAut a;
    for (Symbol c : controls) a.entry.emplace(c, a.add_state());
    return a;
}

/// Saturate for pre*: rule (p, σ -> p', w') adds (s_p, σ, t) whenever the
/// automaton already reads the top-first image of w' from s_{p'} to t.
inline void saturate_pre(PAut& a, const std::vector<PdsRule>& rules) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : rules) {
            Word topfirst(r.push.rbegin(), r.push.rend());
            for (State t : a.read(a.entry.at(r.next_control), topfirst)) {
                if (a.trans.emplace(a.entry.at(r.control), r.top, t).second) changed = true;
            }
        }
    }
}

/// Saturate for post* (rules normalized to pushes of length <= 2).
inline void saturate_post(PAut& a, const std::vector<PdsRule>& rules) {
    std::map<std::size_t, State> helper;  // per push-2 rule
    for (std::size_t i = 0; i < rules.size(); ++i)
        if (rules[i].push.size() == 2) helper.emplace(i, a.add_state());
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < rules.size(); ++i) {
            const PdsRule& r = rules[i];
            std::vector<State> from = a.eps_closure({a.entry.at(r.control)});
            std::sort(from.begin(), from.end());
            std::vector<State> ts = a.step(from, r.top);
            ts = a.eps_closure(ts);
            for (State t : ts) {
                if (r.push.empty()) {
                    if (a.eps.emplace(a.entry.at(r.next_control), t).second) changed = true;
                } else if (r.push.size() == 1) {
                    if (a.trans.emplace(a.entry.at(r.next_control), r.push[0], t).second)
                        changed = true;
                } else {
                    State h = helper.at(i);
                    // new top first, the kept lower symbol below it
                    if (a.trans.emplace(a.entry.at(r.next_control), r.push[1], h).second)
                        changed = true;
                    if (a.trans.emplace(h, r.push[0], t).second) changed = true;
                }
            }
        }
    }
    a.eliminate_eps();
}

/// Restrict a target/source language over configurations to valid shape and
/// extract the per-control stack language (bottom-first).
inline std::map<Symbol, Nfa> per_control_stacks(const Pds& p, const Nfa& configs) {
    std::map<Symbol, Nfa> out;
    Adjacency adj = Adjacency::of(configs);
    for (Symbol c : p.controls) {
        std::vector<State> after;
        for (State i : configs.initials) adj.step_into(i, c, after);
        std::sort(after.begin(), after.end());
        after.erase(std::unique(after.begin(), after.end()), after.end());
        Nfa lang(p.stack);
        lang.num_states = configs.num_states;
        for (State s : after) lang.add_initial(s);
        lang.finals = configs.finals;
        for (const auto& t : configs.transitions)
            if (p.stack.contains(t.sym)) lang.add_transition(t.src, t.sym, t.dst);
        lang.finish();
        out.emplace(c, trim(lang));
    }
    return out;
}

inline Nfa assemble_config_language(const Pds& p, const PAut& a, const Alphabet& cfg_alpha) {
    Nfa out = empty_nfa(cfg_alpha);
    for (Symbol c : p.controls) {
        Nfa stack_lang = a.stack_language(p.stack, a.entry.at(c));
        if (stack_lang.num_states == 0) continue;
        out = unite(out, with_alphabet(prepend_symbol(with_alphabet(stack_lang, cfg_alpha), c),
                                       cfg_alpha));
    }
    return reduce(out);
}

/// Load a per-control config language into the automaton (entry per control
/// reads the reversed stack).
inline void load_config_language(PAut& a, const std::map<Symbol, Nfa>& stacks) {
    for (const auto& [c, lang] : stacks) {
        Nfa topfirst = reverse(lang);
        State off = a.n;
        for (State s = 0; s < topfirst.num_states; ++s) a.add_state();
        for (State s : topfirst.finals) a.final_[off + s] = 1;
        for (const auto& t : topfirst.transitions) a.trans.emplace(off + t.src, t.sym, off + t.dst);
        for (State i : topfirst.initials) {
            if (topfirst.is_final(i)) a.final_[a.entry.at(c)] = 1;
            for (const auto& t : topfirst.transitions)
                if (t.src == i) a.trans.emplace(a.entry.at(c), t.sym, off + t.dst);
        }
    }
}

}  // namespace detail_pds

/// {c : c ->* c' for some c' in targets}, over encoded configurations.
/// `acts` restricts the usable rules; all actions by default.
inline Nfa pre_star(const Pds& p, const Nfa& targets,
                    std::optional<std::vector<Symbol>> acts = std::nullopt) {
    std::vector<Symbol> use = acts ? *acts : p.actions.symbols();
    detail_pds::NormalizedRules nr = detail_pds::normalize_rules(p, use);
    detail_pds::PAut a = detail_pds::make_entries(nr.all_controls);
    detail_pds::load_config_language(a, detail_pds::per_control_stacks(p, targets));
    detail_pds::saturate_pre(a, nr.rules);
    return detail_pds::assemble_config_language(p, a, targets.alphabet);
}

/// {c' : c ->* c' for some c in sources}.
inline Nfa post_star(const Pds& p, const Nfa& sources,
                     std::optional<std::vector<Symbol>> acts = std::nullopt) {
    std::vector<Symbol> use = acts ? *acts : p.actions.symbols();
    detail_pds::NormalizedRules nr = detail_pds::normalize_rules(p, use);
    detail_pds::PAut a = detail_pds::make_entries(nr.all_controls);
    detail_pds::load_config_language(a, detail_pds::per_control_stacks(p, sources));
    detail_pds::saturate_post(a, nr.rules);
    return detail_pds::assemble_config_language(p, a, sources.alphabet);
}

/// The word-automatic presentation of a pushdown system: domain control·Γ*,
/// one transducer per action built rule by rule (shared prefix read on the
/// diagonal, then the top-symbol rewrite tail).
inline AutomaticPresentation pds_to_presentation(const Pds& p) {
    Alphabet cfg = p.config_alphabet();
    AutomaticPresentation out;
    out.actions = p.actions;
    {
        Nfa dom(cfg);
        State i = dom.add_state(), loop = dom.add_state();
        dom.add_initial(i);
        dom.add_final(loop);
        for (Symbol c : p.controls) dom.add_transition(i, c, loop);
        for (Symbol g : p.stack) dom.add_transition(loop, g, loop);
        dom.finish();
        out.domain = dom;
    }
    Alphabet pa = pair_alphabet(cfg);
    for (Symbol act : p.actions) {
        Nfa base(pa);
        for (const auto& r : p.rules) {
            if (r.action != act) continue;
            State i = base.add_state();
            base.add_initial(i);
            State d = base.add_state();
            base.add_transition(i, pair_symbol(r.control, r.next_control), d);
            for (Symbol g : p.stack) base.add_transition(d, pair_symbol(g, g), d);
            if (r.push.empty()) {
                State f = base.add_state();
                base.add_transition(d, pair_symbol(r.top, SymbolTable::pad), f);
                base.add_final(f);
            } else {
                State cur = base.add_state();
                base.add_transition(d, pair_symbol(r.top, r.push[0]), cur);
                for (std::size_t k = 1; k < r.push.size(); ++k) {
                    State nxt = base.add_state();
                    base.add_transition(cur, pair_symbol(SymbolTable::pad, r.push[k]), nxt);
                    cur = nxt;
                }
                base.add_final(cur);
            }
        }
        base.finish();
        out.rel.emplace(act, normalize_convolutions(Transducer{cfg, reduce(base)}));
    }
    return out;
}

/// The transitive closure of the step relation of the sub-system with rules
/// labeled in `acts`, over encoded configurations.
inline Transducer pds_closure(const Pds& p, const std::vector<Symbol>& acts) {
    if (acts.empty()) throw InputError("closure over an empty action subset");
    Alphabet cfg = p.config_alphabet();
    Alphabet pa = pair_alphabet(cfg);
    detail_pds::NormalizedRules nr = detail_pds::normalize_rules(p, acts);

    std::vector<PdsRule> original_rules;
    for (const auto& r : p.rules)
        if (std::find(acts.begin(), acts.end(), r.action) != acts.end())
            original_rules.push_back(r);

    // pre*-automata per pivot (q1, sigma): pop languages
    // post*-automata per pivot: push languages
    struct PivotData {
        detail_pds::PAut pre, post;
    };
    std::map<std::pair<Symbol, Symbol>, PivotData> pivots;
    for (Symbol q1 : nr.all_controls)
        for (Symbol sigma : p.stack) {
            detail_pds::PAut pre = detail_pds::make_entries(nr.all_controls);
            State f = pre.add_state();
            pre.final_[f] = 1;
            pre.trans.emplace(pre.entry.at(q1), sigma, f);
            detail_pds::saturate_pre(pre, nr.rules);

            detail_pds::PAut post = detail_pds::make_entries(nr.all_controls);
            State f2 = post.add_state();
            post.final_[f2] = 1;
            post.trans.emplace(post.entry.at(q1), sigma, f2);
            detail_pds::saturate_post(post, nr.rules);
            pivots.emplace(std::make_pair(q1, sigma), PivotData{std::move(pre), std::move(post)});
        }

    // post* from each original rule's right-hand side: strict push languages
    std::vector<detail_pds::PAut> rule_post;
    for (const auto& r : original_rules) {
        detail_pds::PAut a = detail_pds::make_entries(nr.all_controls);
        Word topfirst(r.push.rbegin(), r.push.rend());
        State cur = a.entry.at(r.next_control);
        if (topfirst.empty()) {
            a.final_[cur] = 1;
        } else {
            for (std::size_t k = 0; k < topfirst.size(); ++k) {
                State nxt = a.add_state();
                a.trans.emplace(cur, topfirst[k], nxt);
                cur = nxt;
            }
            a.final_[cur] = 1;
        }
        detail_pds::saturate_post(a, nr.rules);
        rule_post.push_back(std::move(a));
    }

    std::map<std::tuple<Symbol, Symbol, Symbol>, Nfa> pop_memo, pushl_memo, pushs_memo;
    auto pop_strict = [&](Symbol q, Symbol q1, Symbol sigma) -> const Nfa& {
        auto key = std::make_tuple(q, q1, sigma);
        auto it = pop_memo.find(key);
        if (it != pop_memo.end()) return it->second;
        // union over first rules out of q of {y·top : y·push in pop-language}
        const detail_pds::PAut& pre = pivots.at({q1, sigma}).pre;
        Nfa out = empty_nfa(p.stack);
        for (const auto& r : original_rules) {
            if (r.control != q) continue;
            Nfa lang = pre.stack_language(p.stack, pre.entry.at(r.next_control));
            Nfa quot = right_quotient(lang, r.push);
            if (quot.num_states == 0) continue;
            out = unite(out, with_alphabet(append_symbol(quot, r.top), p.stack));
        }
        return pop_memo.emplace(key, reduce(out)).first->second;
    };
    auto push_lang = [&](Symbol q1, Symbol sigma, Symbol q2) -> const Nfa& {
        auto key = std::make_tuple(q1, sigma, q2);
        auto it = pushl_memo.find(key);
        if (it != pushl_memo.end()) return it->second;
        const detail_pds::PAut& post = pivots.at({q1, sigma}).post;
        return pushl_memo.emplace(key, post.stack_language(p.stack, post.entry.at(q2)))
            .first->second;
    };
    auto push_strict = [&](Symbol q, Symbol sigma, Symbol q2) -> const Nfa& {
        auto key = std::make_tuple(q, sigma, q2);
        auto it = pushs_memo.find(key);
        if (it != pushs_memo.end()) return it->second;
        Nfa out = empty_nfa(p.stack);
        for (std::size_t i = 0; i < original_rules.size(); ++i) {
            const auto& r = original_rules[i];
            if (r.control != q || r.top != sigma) continue;
            out = unite(out, rule_post[i].stack_language(p.stack, rule_post[i].entry.at(q2)));
        }
        return pushs_memo.emplace(key, reduce(out)).first->second;
    };

    // pair language {u ⊗ v : u ∈ A, v ∈ B} over the configuration alphabet
    auto pair_language = [&](const Nfa& a, const Nfa& b) -> Nfa {
        Nfa wa = with_alphabet(a, cfg);
        Nfa wb = with_alphabet(b, cfg);
        return intersect(detail::lift_left(wa), detail::lift_right(wb));
    };

    Nfa closure_base = empty_nfa(pa);
    for (Symbol q : p.controls.symbols())
        for (Symbol q2 : p.controls.symbols()) {
            Nfa tails = empty_nfa(pa);
            bool any = false;
            for (Symbol q1 : nr.all_controls)
                for (Symbol sigma : p.stack) {
                    const Nfa& pop = pop_strict(q, q1, sigma);
                    if (pop.num_states == 0) continue;
                    const Nfa& push = push_lang(q1, sigma, q2);
                    if (push.num_states == 0) continue;
                    tails = unite(tails, pair_language(pop, push));
                    any = true;
                }
            for (Symbol sigma : p.stack) {
                const Nfa& push = push_strict(q, sigma, q2);
                if (push.num_states == 0) continue;
                tails = unite(tails, pair_language(singleton_nfa(p.stack, {sigma}), push));
                any = true;
            }
            if (!any) continue;
            tails = reduce(tails);
            // entry letter (q, q2), shared diagonal prefix, then the tails
            Nfa branch(pa);
            State i = branch.add_state(), d = branch.add_state();
            branch.add_initial(i);
            branch.add_transition(i, pair_symbol(q, q2), d);
            for (Symbol g : p.stack) branch.add_transition(d, pair_symbol(g, g), d);
            State off = branch.num_states;
            branch.num_states += tails.num_states;
            for (State s : tails.finals) branch.add_final(off + s);
            for (const auto& t : tails.transitions)
                branch.add_transition(off + t.src, t.sym, off + t.dst);
            for (State s : tails.initials)
                for (const auto& t : tails.transitions)
                    if (t.src == s) branch.add_transition(d, t.sym, off + t.dst);
            branch.finish();
            closure_base = unite(closure_base, branch);
        }
    return normalize_convolutions(Transducer{cfg, reduce(closure_base)});
}

}  // namespace rmc
