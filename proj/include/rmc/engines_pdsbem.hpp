/* engines_pdsbem.hpp -- exact LTL engine for pushdown systems.
 *
 * The negation's Büchi automaton is multiplied into the rules; the product
 * has an accepting run iff some reachable configuration carries a head that
 * sits on a cycle of the head-reachability relation through an accepting
 * control. Drains (p,γ) ⇒ (p'', ε) are a finite fixpoint with acceptance
 * bits; head edges follow from rules plus drains; accepting head cycles are
 * found by a bit-layered search whose parents rebuild a concrete lasso.
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

#include "rmc/pds.hpp"
#include "rmc/tableau.hpp"

namespace rmc {

namespace detail_bem {

struct TaggedRule {
    PdsRule rule;
    std::size_t origin;  // original rule index
    bool emits;          // first sub-rule of its original step
};

inline std::vector<TaggedRule> normalize_tagged(const std::vector<PdsRule>& rules) {
    std::vector<TaggedRule> out;
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const PdsRule& r = rules[i];
        if (r.push.size() <= 2) {
            out.push_back({r, i, true});
            continue;
        }
        Symbol src = r.control;
        for (std::size_t k = 0; k + 2 <= r.push.size(); ++k) {
            bool last = k + 2 == r.push.size();
            Symbol dst = last ? r.next_control
                              : SymbolTable::instance().fresh(symbol_name(r.control) + "+");
            Symbol top = (k == 0) ? r.top : r.push[k];
            out.push_back({{src, top, r.action, dst, {r.push[k], r.push[k + 1]}}, i, k == 0});
            src = dst;
        }
    }
    return out;
}

/// Drain and head-edge analysis over integer-indexed controls and symbols.
struct HeadAnalysis {
    std::map<Symbol, int> cid, gid;
    std::vector<Symbol> controls, stack;
    std::vector<char> accepting;  // per control index
    std::vector<TaggedRule> rules;
    int n_c = 0, n_g = 0;

    int control_index(Symbol s) {
        auto it = cid.find(s);
        if (it != cid.end()) return it->second;
        cid.emplace(s, n_c);
        controls.push_back(s);
        accepting.push_back(0);
        return n_c++;
    }
    int stack_index(Symbol s) {
        auto it = gid.find(s);
        if (it != gid.end()) return it->second;
        gid.emplace(s, n_g);
        stack.push_back(s);
        return n_g++;
    }

    int head(int c, int g) const { return c * n_g + g; }

    // drains: (c,g,b) -> set of c'' with a derivation
    struct DDer {
        int kind;  // 0 pop, 1 chain1, 2 chain2
        std::size_t rule;
        int d1 = -1, d2 = -1;  // indices into dlist
    };
    struct DFact {
        int c, g, c2, b;
    };
    std::vector<DFact> dlist;
    std::vector<DDer> dders;
    std::map<std::tuple<int, int, int, int>, int> dindex;

    int add_d(int c, int g, int c2, int b, DDer d) {
        auto key = std::make_tuple(c, g, c2, b);
        auto it = dindex.find(key);
        if (it != dindex.end()) return -1;
        dindex.emplace(key, static_cast<int>(dlist.size()));
        dlist.push_back({c, g, c2, b});
        dders.push_back(d);
        return static_cast<int>(dlist.size()) - 1;
    }

    // head edges: (c,g) -> (c',g') with bit and a derivation
    struct Edge {
        int from, to, bit;
        int kind;  // 0 step, 1 drainstep
        std::size_t rule;
        int dfact = -1;
    };
    std::vector<Edge> edges;

    void run() {
        // drain fixpoint (depends only on itself)
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t ri = 0; ri < rules.size(); ++ri) {
                const PdsRule& r = rules[ri].rule;
                int c = cid.at(r.control), g = gid.at(r.top), c1 = cid.at(r.next_control);
                int accbit = accepting[c];
                if (r.push.empty()) {
                    if (add_d(c, g, c1, accbit, {0, ri, -1, -1}) >= 0) changed = true;
                } else if (r.push.size() == 1) {
                    int g1 = gid.at(r.push[0]);
                    std::size_t n = dlist.size();
                    for (std::size_t i = 0; i < n; ++i)
                        if (dlist[i].c == c1 && dlist[i].g == g1)
                            if (add_d(c, g, dlist[i].c2, accbit | dlist[i].b,
                                      {1, ri, static_cast<int>(i), -1}) >= 0)
                                changed = true;
                } else {
                    int g1 = gid.at(r.push[0]), g2 = gid.at(r.push[1]);
                    std::size_t n = dlist.size();
                    for (std::size_t i = 0; i < n; ++i) {
                        if (dlist[i].c != c1 || dlist[i].g != g2) continue;
                        for (std::size_t j = 0; j < n; ++j) {
                            if (dlist[j].c != dlist[i].c2 || dlist[j].g != g1) continue;
                            if (add_d(c, g, dlist[j].c2, accbit | dlist[i].b | dlist[j].b,
                                      {2, ri, static_cast<int>(i), static_cast<int>(j)}) >= 0)
                                changed = true;
                        }
                    }
                }
            }
        }
        // head edges
        for (std::size_t ri = 0; ri < rules.size(); ++ri) {
            const PdsRule& r = rules[ri].rule;
            int c = cid.at(r.control), g = gid.at(r.top), c1 = cid.at(r.next_control);
            int accbit = accepting[c];
            if (r.push.empty()) continue;
            if (r.push.size() == 1) {
                edges.push_back({head(c, g), head(c1, gid.at(r.push[0])), accbit, 0, ri, -1});
            } else {
                int g1 = gid.at(r.push[0]), g2 = gid.at(r.push[1]);
                edges.push_back({head(c, g), head(c1, g2), accbit, 0, ri, -1});
                for (std::size_t i = 0; i < dlist.size(); ++i)
                    if (dlist[i].c == c1 && dlist[i].g == g2)
                        edges.push_back({head(c, g), head(dlist[i].c2, g1),
                                         accbit | dlist[i].b, 1, ri, static_cast<int>(i)});
            }
        }
    }

    /// Edge sequence of an accepting cycle through `h`, if one exists:
    /// a path h -> h accumulating bit 1 in the bit-layered graph.
    std::optional<std::vector<int>> accepting_cycle(int h) const {
        const int n = n_c * n_g;
        // layered nodes: node * 2 + accumulated bit
        std::vector<int> parent_edge(2 * n, -1), parent_node(2 * n, -1);
        std::vector<char> seen(2 * n, 0);
        std::deque<int> q;
        auto start = [&](int node) {
            seen[node] = 1;
            q.push_back(node);
        };
        start(h * 2);
        std::vector<std::vector<int>> out(n);
        for (std::size_t i = 0; i < edges.size(); ++i) out[edges[i].from].push_back(static_cast<int>(i));
        while (!q.empty()) {
            int ln = q.front();
            q.pop_front();
            int node = ln / 2, bit = ln % 2;
            for (int ei : out[node]) {
                int nb = bit | edges[ei].bit;
                int to = edges[ei].to * 2 + nb;
                if (edges[ei].to == h && nb == 1) {
                    // reconstruct
                    std::vector<int> path{ei};
                    int cur = ln;
                    while (parent_edge[cur] >= 0) {
                        path.push_back(parent_edge[cur]);
                        cur = parent_node[cur];
                    }
                    std::reverse(path.begin(), path.end());
                    return path;
                }
                if (!seen[to]) {
                    seen[to] = 1;
                    parent_edge[to] = ei;
                    parent_node[to] = ln;
                    q.push_back(to);
                }
            }
        }
        return std::nullopt;
    }

    std::vector<std::size_t> run_of_d(int di) const {
        const DDer& d = dders[di];
        std::vector<std::size_t> out{d.rule};
        if (d.kind >= 1) {
            auto inner = run_of_d(d.d1);
            out.insert(out.end(), inner.begin(), inner.end());
        }
        if (d.kind == 2) {
            auto inner = run_of_d(d.d2);
            out.insert(out.end(), inner.begin(), inner.end());
        }
        return out;
    }

    std::vector<std::size_t> run_of_edge(int ei) const {
        const Edge& e = edges[ei];
        std::vector<std::size_t> out{e.rule};
        if (e.kind == 1) {
            auto inner = run_of_d(e.dfact);
            out.insert(out.end(), inner.begin(), inner.end());
        }
        return out;
    }
};

/// Apply a rule to an encoded configuration (must be applicable).
inline Word apply_rule(const PdsRule& r, const Word& config) {
    if (config.size() < 2 || config[0] != r.control || config.back() != r.top)
        throw SoundnessError("witness replay: rule does not apply");
    Word out(config.begin(), config.end() - 1);
    out[0] = r.next_control;
    out.insert(out.end(), r.push.begin(), r.push.end());
    return out;
}

}  // namespace detail_bem

/// Exact check for pushdown systems via the rule-level product with the
/// negation automaton. Always returns a definite verdict; a violation comes
/// with a validated lasso.
inline CheckResult check_pds_bem(const Pds& pds, const ltl::LtlFormula& phi, const Word& v0,
                                 const EngineConfig& cfg = {}) {
    CheckResult res;
    res.engine = "pdsbem";
    res.init = v0;
    if (v0.empty() || !pds.controls.contains(v0[0]))
        throw InputError("initial state is not a configuration of the system");
    for (std::size_t i = 1; i < v0.size(); ++i)
        if (!pds.stack.contains(v0[i])) throw InputError("initial stack leaves the stack alphabet");

    Nbwa neg = tableau(ltl::negated(phi));
    if (neg.num_states == 0) {
        res.verdict = Verdict::Holds;
        res.note = "the negated formula has no models";
        return res;
    }

    // product controls (q, s); reuse interned names so repeated checks do not
    // grow the symbol table
    std::map<std::pair<Symbol, State>, Symbol> fuse;
    std::vector<Symbol> prod_controls;
    for (Symbol q : pds.controls)
        for (State s = 0; s < neg.num_states; ++s) {
            std::string nm = symbol_name(q) + "#" + std::to_string(s);
            auto existing = SymbolTable::instance().find(nm);
            Symbol sym;
            if (!existing)
                sym = SymbolTable::instance().intern(nm);
            else if (pds.stack.contains(*existing) || pds.controls.contains(*existing))
                sym = SymbolTable::instance().fresh(nm);
            else
                sym = *existing;
            fuse.emplace(std::make_pair(q, s), sym);
            prod_controls.push_back(sym);
        }

    Pds prod;
    prod.actions = pds.actions;
    prod.stack = pds.stack;
    prod.controls = Alphabet(prod_controls);
    std::vector<std::vector<std::pair<Symbol, State>>> badj(neg.num_states);
    for (const auto& t : neg.transitions) badj[t.src].emplace_back(t.sym, t.dst);
    for (const auto& r : pds.rules)
        for (State s = 0; s < neg.num_states; ++s)
            for (const auto& [a, s2] : badj[s]) {
                if (a != r.action) continue;
                prod.rules.push_back({fuse.at({r.control, s}), r.top, r.action,
                                      fuse.at({r.next_control, s2}), r.push});
            }

    detail_bem::HeadAnalysis ha;
    ha.rules = detail_bem::normalize_tagged(prod.rules);
    for (Symbol q : pds.controls)
        for (State s = 0; s < neg.num_states; ++s) {
            int ci = ha.control_index(fuse.at({q, s}));
            ha.accepting[ci] = neg.accepting[s];
        }
    for (const auto& tr : ha.rules) {
        ha.control_index(tr.rule.control);
        ha.control_index(tr.rule.next_control);
        ha.stack_index(tr.rule.top);
        for (Symbol g : tr.rule.push) ha.stack_index(g);
    }
    for (Symbol g : pds.stack) ha.stack_index(g);
    ha.run();

    // heads of genuine product controls with an accepting cycle
    std::vector<std::pair<Symbol, Symbol>> cycle_heads;
    for (Symbol c : prod_controls)
        for (Symbol g : pds.stack)
            if (ha.accepting_cycle(ha.head(ha.cid.at(c), ha.gid.at(g))))
                cycle_heads.emplace_back(c, g);

    if (cycle_heads.empty()) {
        res.verdict = Verdict::Holds;
        return res;
    }

    // target: any configuration whose head lies on an accepting cycle
    Alphabet cfg_alpha = prod.config_alphabet();
    Nfa targets(cfg_alpha);
    {
        State ini = targets.add_state();
        targets.add_initial(ini);
        std::map<Symbol, State> mid;
        for (const auto& [c, g] : cycle_heads) {
            auto it = mid.find(c);
            if (it == mid.end()) {
                State m = targets.add_state();
                targets.add_transition(ini, c, m);
                for (Symbol gg : pds.stack) targets.add_transition(m, gg, m);
                it = mid.emplace(c, m).first;
            }
            State f = targets.add_state();
            targets.add_final(f);
            targets.add_transition(it->second, g, f);
        }
        targets.finish();
    }
    Nfa pre = pre_star(prod, targets);

    std::optional<Word> violating_init;
    for (State s0 : neg.initials) {
        Word enc = v0;
        enc[0] = fuse.at({v0[0], s0});
        if (member(pre, enc)) {
            violating_init = enc;
            break;
        }
    }
    if (!violating_init) {
        res.verdict = Verdict::Holds;
        return res;
    }
    res.verdict = Verdict::Violated;
    if (!cfg.want_witness) return res;

    // prefix: breadth-first search to the nearest cycle-head configuration
    std::set<std::pair<Symbol, Symbol>> head_set(cycle_heads.begin(), cycle_heads.end());
    auto acts = prod.actions.symbols();
    struct Node {
        Word config;
        int parent;
        Symbol action;
    };
    std::vector<Node> nodes{{*violating_init, -1, 0}};
    std::set<Word> seen{*violating_init};
    std::deque<int> bfs{0};
    std::optional<int> hit;
    auto is_target = [&](const Word& c) {
        return c.size() >= 2 && head_set.count({c[0], c.back()}) > 0;
    };
    if (is_target(*violating_init)) hit = 0;
    while (!hit && !bfs.empty()) {
        int id = bfs.front();
        bfs.pop_front();
        for (const auto& [a, nxt] : pds_step(prod, nodes[id].config, acts)) {
            if (seen.count(nxt)) continue;
            seen.insert(nxt);
            nodes.push_back({nxt, id, a});
            if (is_target(nxt)) {
                hit = static_cast<int>(nodes.size()) - 1;
                break;
            }
            bfs.push_back(static_cast<int>(nodes.size()) - 1);
        }
    }
    if (!hit) throw SoundnessError("violating configuration claimed but no head is reachable");

    Word prefix_actions;
    std::vector<Word> config_chain;
    {
        std::vector<int> path;
        for (int cur = *hit; cur >= 0; cur = nodes[cur].parent) path.push_back(cur);
        std::reverse(path.begin(), path.end());
        for (std::size_t i = 0; i < path.size(); ++i) {
            config_chain.push_back(nodes[path[i]].config);
            if (i) prefix_actions.push_back(nodes[path[i]].action);
        }
    }
    const Word anchor = config_chain.back();

    // cycle: replay the head-cycle derivation from the anchor
    auto cyc = ha.accepting_cycle(ha.head(ha.cid.at(anchor[0]), ha.gid.at(anchor.back())));
    if (!cyc) throw SoundnessError("anchor head lost its accepting cycle");
    Word cycle_actions;
    Word cur = anchor;
    for (int ei : *cyc) {
        for (std::size_t ri : ha.run_of_edge(ei)) {
            const detail_bem::TaggedRule& tr = ha.rules[ri];
            if (!tr.emits) continue;
            const PdsRule& orig = prod.rules[tr.origin];
            cur = detail_bem::apply_rule(orig, cur);
            cycle_actions.push_back(orig.action);
            config_chain.push_back(cur);
        }
    }
    if (cur[0] != anchor[0] || cur.back() != anchor.back())
        throw SoundnessError("cycle replay does not return to its head");

    // validation: the action lasso violates the formula and the chain steps
    // are genuine one-step moves
    if (!nbwa_lasso_member(neg, prefix_actions, cycle_actions))
        throw SoundnessError("extracted lasso does not violate the formula");
    for (std::size_t i = 0; i + 1 < config_chain.size(); ++i) {
        bool ok = false;
        for (const auto& [a, nxt] : pds_step(prod, config_chain[i], acts))
            if (nxt == config_chain[i + 1]) ok = true;
        if (!ok) throw SoundnessError("extracted run contains a non-step");
    }
    EngineWitness ew;
    ew.chain = config_chain;
    ew.lasso = std::make_pair(prefix_actions, cycle_actions);
    ew.description = "lasso through a repeating head";
    res.witness = std::move(ew);
    res.certificate_validated = true;
    return res;
}

}  // namespace rmc
