/* ltl.hpp -- linear temporal logic over action alphabets.
 *
 * Formulas are evaluated over infinite action words: an atom holds at a
 * position iff the letter at that position belongs to its letter set.
 * Purely propositional subtrees are compiled to letter sets at parse time,
 * so boolean combinations of actions collapse into single Atom nodes.
 */

#pragma once

#include <algorithm>
#include <cctype>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rmc/symbols.hpp"

namespace rmc::ltl {

using LetterSet = std::vector<Symbol>;  // sorted unique

inline LetterSet ls_intersect(const LetterSet& a, const LetterSet& b) {
    LetterSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline LetterSet ls_union(const LetterSet& a, const LetterSet& b) {
    LetterSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

inline LetterSet ls_complement(const Alphabet& actions, const LetterSet& a) {
    LetterSet out;
    for (Symbol s : actions)
        if (!std::binary_search(a.begin(), a.end(), s)) out.push_back(s);
    return out;
}

inline bool ls_contains(const LetterSet& a, Symbol s) {
    return std::binary_search(a.begin(), a.end(), s);
}

enum class Op {
    Atom,      // letter set
    Not,
    And,
    Or,
    Next,      // X
    Until,     // U
    WUntil,    // W
    Future,    // F
    Globally,  // G
    SFuture,   // Fs (strict)
    SGlobally  // Gs (strict)
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    Op op;
    LetterSet pred;     // Atom only
    FormulaPtr lhs, rhs;  // rhs only for binary ops

    static FormulaPtr atom(LetterSet s) {
        return std::make_shared<Formula>(Formula{Op::Atom, std::move(s), nullptr, nullptr});
    }
    static FormulaPtr unary(Op op, FormulaPtr f) {
        return std::make_shared<Formula>(Formula{op, {}, std::move(f), nullptr});
    }
    static FormulaPtr binary(Op op, FormulaPtr l, FormulaPtr r) {
        return std::make_shared<Formula>(Formula{op, {}, std::move(l), std::move(r)});
    }
};

/// A formula together with the action alphabet it speaks about.
struct LtlFormula {
    Alphabet actions;
    FormulaPtr root;
};

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op || a->pred != b->pred) return false;
    return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

inline bool equal(const LtlFormula& a, const LtlFormula& b) {
    return a.actions == b.actions && equal(a.root, b.root);
}

inline std::size_t formula_size(const FormulaPtr& f) {
    if (!f) return 0;
    return 1 + formula_size(f->lhs) + formula_size(f->rhs);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

struct Token {
    enum Kind { Ident, LPar, RPar, NotOp, AndOp, OrOp, End } kind;
    std::string text;
    std::size_t pos;
};

inline std::vector<Token> lex(const std::string& text) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        switch (c) {
            case '(': out.push_back({Token::LPar, "(", i++}); continue;
            case ')': out.push_back({Token::RPar, ")", i++}); continue;
            case '!': out.push_back({Token::NotOp, "!", i++}); continue;
            case '&': out.push_back({Token::AndOp, "&", i++}); continue;
            case '|': out.push_back({Token::OrOp, "|", i++}); continue;
            default: break;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_'))
                ++i;
            out.push_back({Token::Ident, text.substr(start, i - start), start});
            continue;
        }
        throw InputError("formula syntax error at position " + std::to_string(i) +
                         ": unexpected character '" + std::string(1, c) + "'");
    }
    out.push_back({Token::End, "", text.size()});
    return out;
}

struct Parser {
    const Alphabet& actions;
    std::vector<Token> toks;
    std::size_t idx = 0;

    const Token& peek() const { return toks[idx]; }
    Token take() { return toks[idx++]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError("formula syntax error at position " + std::to_string(peek().pos) + ": " + msg);
    }

    FormulaPtr parse_or() {
        FormulaPtr f = parse_and();
        while (peek().kind == Token::OrOp) {
            take();
            f = Formula::binary(Op::Or, f, parse_and());
        }
        return f;
    }

    FormulaPtr parse_and() {
        FormulaPtr f = parse_until();
        while (peek().kind == Token::AndOp) {
            take();
            f = Formula::binary(Op::And, f, parse_until());
        }
        return f;
    }

    FormulaPtr parse_until() {
        FormulaPtr f = parse_unary();
        if (peek().kind == Token::Ident && (peek().text == "U" || peek().text == "W")) {
            std::string op = take().text;
            FormulaPtr r = parse_until();  // right associative
            f = Formula::binary(op == "U" ? Op::Until : Op::WUntil, f, r);
        }
        return f;
    }

    FormulaPtr parse_unary() {
        if (peek().kind == Token::NotOp) {
            take();
            return Formula::unary(Op::Not, parse_unary());
        }
        if (peek().kind == Token::Ident) {
            const std::string& t = peek().text;
            Op op;
            if (t == "X") op = Op::Next;
            else if (t == "F") op = Op::Future;
            else if (t == "G") op = Op::Globally;
            else if (t == "Fs") op = Op::SFuture;
            else if (t == "Gs") op = Op::SGlobally;
            else return parse_primary();
            take();
            return Formula::unary(op, parse_unary());
        }
        return parse_primary();
    }

    FormulaPtr parse_primary() {
        const Token& t = peek();
        if (t.kind == Token::LPar) {
            take();
            FormulaPtr f = parse_or();
            if (peek().kind != Token::RPar) fail("expected ')'");
            take();
            return f;
        }
        if (t.kind == Token::Ident) {
            if (t.text == "true") {
                take();
                return Formula::atom(LetterSet(actions.symbols()));
            }
            if (t.text == "false") {
                take();
                return Formula::atom({});
            }
            auto sym = SymbolTable::instance().find(t.text);
            if (!sym || !actions.contains(*sym))
                fail("unknown action '" + t.text + "'");
            take();
            return Formula::atom({*sym});
        }
        fail("expected a formula");
    }
};

/// Merge purely propositional subtrees into single letter-set atoms.
inline FormulaPtr compile_predicates(const Alphabet& actions, const FormulaPtr& f) {
    if (!f) return f;
    FormulaPtr l = compile_predicates(actions, f->lhs);
    FormulaPtr r = compile_predicates(actions, f->rhs);
    switch (f->op) {
        case Op::Atom:
            return f;
        case Op::Not:
            if (l->op == Op::Atom) return Formula::atom(ls_complement(actions, l->pred));
            break;
        case Op::And:
            if (l->op == Op::Atom && r->op == Op::Atom)
                return Formula::atom(ls_intersect(l->pred, r->pred));
            break;
        case Op::Or:
            if (l->op == Op::Atom && r->op == Op::Atom)
                return Formula::atom(ls_union(l->pred, r->pred));
            break;
        default:
            break;
    }
    if (l == f->lhs && r == f->rhs) return f;
    if (f->rhs) return Formula::binary(f->op, l, r);
    return Formula::unary(f->op, l);
}

}  // namespace detail

inline LtlFormula parse(const std::string& text, const Alphabet& actions) {
    detail::Parser p{actions, detail::lex(text)};
    FormulaPtr f = p.parse_or();
    if (p.peek().kind != detail::Token::End) p.fail("trailing input");
    return {actions, detail::compile_predicates(actions, f)};
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(Op op) {
    switch (op) {
        case Op::Or: return 1;
        case Op::And: return 2;
        case Op::Until:
        case Op::WUntil: return 3;
        default: return 4;
    }
}

inline void print_rec(const Alphabet& actions, const FormulaPtr& f, int outer, std::string& out) {
    auto wrapped = [&](int inner, auto&& body) {
        bool need = inner < outer;
        if (need) out += "(";
        body();
        if (need) out += ")";
    };
    switch (f->op) {
        case Op::Atom: {
            if (f->pred.empty()) {
                out += "false";
            } else if (f->pred.size() == actions.size()) {
                out += "true";
            } else if (f->pred.size() == 1) {
                out += symbol_name(f->pred[0]);
            } else {
                out += "(";
                for (std::size_t i = 0; i < f->pred.size(); ++i) {
                    if (i) out += " | ";
                    out += symbol_name(f->pred[i]);
                }
                out += ")";
            }
            return;
        }
        case Op::Not:
            out += "!";
            print_rec(actions, f->lhs, 4, out);
            return;
        case Op::Next:
        case Op::Future:
        case Op::Globally:
        case Op::SFuture:
        case Op::SGlobally: {
            const char* name = f->op == Op::Next ? "X"
                               : f->op == Op::Future ? "F"
                               : f->op == Op::Globally ? "G"
                               : f->op == Op::SFuture ? "Fs" : "Gs";
            out += name;
            out += " ";
            print_rec(actions, f->lhs, 4, out);
            return;
        }
        case Op::And:
            wrapped(2, [&] {
                print_rec(actions, f->lhs, 2, out);
                out += " & ";
                print_rec(actions, f->rhs, 3, out);
            });
            return;
        case Op::Or:
            wrapped(1, [&] {
                print_rec(actions, f->lhs, 1, out);
                out += " | ";
                print_rec(actions, f->rhs, 2, out);
            });
            return;
        case Op::Until:
        case Op::WUntil:
            wrapped(3, [&] {
                print_rec(actions, f->lhs, 4, out);
                out += f->op == Op::Until ? " U " : " W ";
                print_rec(actions, f->rhs, 3, out);
            });
            return;
    }
}

}  // namespace detail

inline std::string print(const LtlFormula& f) {
    std::string out;
    detail::print_rec(f.actions, f.root, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Negation normal form

namespace detail {

inline FormulaPtr nnf_rec(const Alphabet& actions, const FormulaPtr& f, bool neg) {
    switch (f->op) {
        case Op::Atom:
            return Formula::atom(neg ? ls_complement(actions, f->pred) : f->pred);
        case Op::Not:
            return nnf_rec(actions, f->lhs, !neg);
        case Op::And:
        case Op::Or: {
            FormulaPtr l = nnf_rec(actions, f->lhs, neg);
            FormulaPtr r = nnf_rec(actions, f->rhs, neg);
            Op op = (f->op == Op::And) == !neg ? Op::And : Op::Or;
            if (l->op == Op::Atom && r->op == Op::Atom)
                return Formula::atom(op == Op::And ? ls_intersect(l->pred, r->pred)
                                                   : ls_union(l->pred, r->pred));
            return Formula::binary(op, l, r);
        }
        case Op::Next:
            return Formula::unary(Op::Next, nnf_rec(actions, f->lhs, neg));
        case Op::Future:
            return Formula::unary(neg ? Op::Globally : Op::Future, nnf_rec(actions, f->lhs, neg));
        case Op::Globally:
            return Formula::unary(neg ? Op::Future : Op::Globally, nnf_rec(actions, f->lhs, neg));
        case Op::SFuture:
            return Formula::unary(neg ? Op::SGlobally : Op::SFuture, nnf_rec(actions, f->lhs, neg));
        case Op::SGlobally:
            return Formula::unary(neg ? Op::SFuture : Op::SGlobally, nnf_rec(actions, f->lhs, neg));
        case Op::Until:
        case Op::WUntil: {
            if (!neg) {
                FormulaPtr l = nnf_rec(actions, f->lhs, false);
                FormulaPtr r = nnf_rec(actions, f->rhs, false);
                return Formula::binary(f->op, l, r);
            }
            // ¬(l U r) = ¬r W (¬l ∧ ¬r), ¬(l W r) = ¬r U (¬l ∧ ¬r)
            FormulaPtr nl = nnf_rec(actions, f->lhs, true);
            FormulaPtr nr = nnf_rec(actions, f->rhs, true);
            FormulaPtr both = (nl->op == Op::Atom && nr->op == Op::Atom)
                                  ? Formula::atom(ls_intersect(nl->pred, nr->pred))
                                  : Formula::binary(Op::And, nl, nr);
            return Formula::binary(f->op == Op::Until ? Op::WUntil : Op::Until, nr, both);
        }
    }
    throw SoundnessError("nnf: unhandled operator");
}

}  // namespace detail

inline LtlFormula nnf(const LtlFormula& f) {
    return {f.actions, detail::nnf_rec(f.actions, f.root, false)};
}

inline LtlFormula negated(const LtlFormula& f) {
    return {f.actions, detail::nnf_rec(f.actions, f.root, true)};
}

// ---------------------------------------------------------------------------
// Fragment classification

enum class Fragment { Det, Fg, Full };

namespace detail {

inline void collect_conjuncts(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    if (f->op == Op::And) {
        collect_conjuncts(f->lhs, out);
        collect_conjuncts(f->rhs, out);
    } else {
        out.push_back(f);
    }
}

struct GuardView {
    std::vector<LetterSet> atoms;   // propositional conjuncts
    std::vector<FormulaPtr> rest;   // the remaining conjuncts
};

inline GuardView guard_view(const FormulaPtr& f) {
    std::vector<FormulaPtr> conjuncts;
    collect_conjuncts(f, conjuncts);
    GuardView out;
    for (const auto& c : conjuncts) {
        if (c->op == Op::Atom)
            out.atoms.push_back(c->pred);
        else
            out.rest.push_back(c);
    }
    return out;
}

/// All intersections of subsets of `atoms` (the empty subset gives ACT).
inline std::set<LetterSet> subset_intersections(const Alphabet& actions,
                                                const std::vector<LetterSet>& atoms) {
    std::set<LetterSet> out{LetterSet(actions.symbols())};
    for (const auto& a : atoms) {
        std::set<LetterSet> grown = out;
        for (const auto& x : out) grown.insert(ls_intersect(x, a));
        out = std::move(grown);
    }
    return out;
}

inline bool is_det_rec(const Alphabet& actions, const FormulaPtr& f);

/// Match l OP r against (p ∧ φ) OP (¬p ∧ φ') and return the guard p.
/// Predicate compilation may have merged the written guards into larger
/// conjunct atoms, so every subset intersection is tried; a right side that
/// collapsed to ⊥ matches any guard.
inline std::optional<LetterSet> det_guard_match(const Alphabet& actions, const FormulaPtr& l,
                                                const FormulaPtr& r) {
    GuardView gl = guard_view(l);
    GuardView gr = guard_view(r);
    for (const auto& c : gl.rest)
        if (!is_det_rec(actions, c)) return std::nullopt;
    for (const auto& c : gr.rest)
        if (!is_det_rec(actions, c)) return std::nullopt;
    LetterSet right_all(actions.symbols());
    for (const auto& a : gr.atoms) right_all = ls_intersect(right_all, a);
    LetterSet left_all(actions.symbols());
    for (const auto& a : gl.atoms) left_all = ls_intersect(left_all, a);
    if (right_all.empty()) return left_all;  // right side is identically ⊥
    std::set<LetterSet> left_inters = subset_intersections(actions, gl.atoms);
    std::set<LetterSet> right_inters = subset_intersections(actions, gr.atoms);
    for (const auto& p : left_inters)
        if (right_inters.count(ls_complement(actions, p))) return p;
    return std::nullopt;
}

inline bool is_det_rec(const Alphabet& actions, const FormulaPtr& f) {
    switch (f->op) {
        case Op::Atom:
            return true;
        case Op::Next:
        case Op::Globally:
        case Op::SGlobally:
            return is_det_rec(actions, f->lhs);
        case Op::And:
            return is_det_rec(actions, f->lhs) && is_det_rec(actions, f->rhs);
        case Op::Or: {
            if (f->lhs->op == Op::Atom && f->lhs->pred.empty()) return is_det_rec(actions, f->rhs);
            if (f->rhs->op == Op::Atom && f->rhs->pred.empty()) return is_det_rec(actions, f->lhs);
            return det_guard_match(actions, f->lhs, f->rhs).has_value() ||
                   det_guard_match(actions, f->rhs, f->lhs).has_value();
        }
        case Op::Until:
        case Op::WUntil:
            return det_guard_match(actions, f->lhs, f->rhs).has_value();
        default:
            return false;
    }
}

inline bool is_fg_rec(const FormulaPtr& f) {
    switch (f->op) {
        case Op::Atom:
            return true;
        case Op::Not:
        case Op::SFuture:
        case Op::SGlobally:
            return is_fg_rec(f->lhs);
        case Op::And:
        case Op::Or:
            return is_fg_rec(f->lhs) && is_fg_rec(f->rhs);
        default:
            return false;
    }
}

}  // namespace detail

inline bool is_det(const LtlFormula& f) { return detail::is_det_rec(f.actions, f.root); }
inline bool is_fg(const LtlFormula& f) { return detail::is_fg_rec(f.root); }

inline Fragment classify(const LtlFormula& f) {
    if (is_det(f)) return Fragment::Det;
    if (is_fg(f)) return Fragment::Fg;
    return Fragment::Full;
}

// ---------------------------------------------------------------------------
// Exact satisfaction on ultimately periodic words u·v^ω

namespace detail {

struct LassoEval {
    std::size_t prefix, period;
    std::vector<Symbol> letters;  // prefix then one period

    std::size_t positions() const { return prefix + period; }
    std::size_t succ(std::size_t i) const { return i + 1 < positions() ? i + 1 : prefix; }

    std::vector<char> eval(const FormulaPtr& f) const {
        std::size_t n = positions();
        std::vector<char> val(n, 0);
        switch (f->op) {
            case Op::Atom: {
                for (std::size_t i = 0; i < n; ++i) val[i] = ls_contains(f->pred, letters[i]);
                return val;
            }
            case Op::Not: {
                auto c = eval(f->lhs);
                for (std::size_t i = 0; i < n; ++i) val[i] = !c[i];
                return val;
            }
            case Op::And: {
                auto l = eval(f->lhs), r = eval(f->rhs);
                for (std::size_t i = 0; i < n; ++i) val[i] = l[i] && r[i];
                return val;
            }
            case Op::Or: {
                auto l = eval(f->lhs), r = eval(f->rhs);
                for (std::size_t i = 0; i < n; ++i) val[i] = l[i] || r[i];
                return val;
            }
            case Op::Next: {
                auto c = eval(f->lhs);
                for (std::size_t i = 0; i < n; ++i) val[i] = c[succ(i)];
                return val;
            }
            case Op::Future:
            case Op::Globally: {
                auto c = eval(f->lhs);
                return fix(f->op == Op::Future, [&](std::size_t i, char nxt) {
                    return f->op == Op::Future ? (c[i] || nxt) : (c[i] && nxt);
                });
            }
            case Op::SFuture:
            case Op::SGlobally: {
                auto c = eval(f->lhs);
                auto base = fix(f->op == Op::SFuture, [&](std::size_t i, char nxt) {
                    return f->op == Op::SFuture ? (c[i] || nxt) : (c[i] && nxt);
                });
                for (std::size_t i = 0; i < n; ++i) val[i] = base[succ(i)];
                return val;
            }
            case Op::Until:
            case Op::WUntil: {
                auto l = eval(f->lhs), r = eval(f->rhs);
                return fix(f->op == Op::Until, [&](std::size_t i, char nxt) {
                    return r[i] || (l[i] && nxt);
                });
            }
        }
        throw SoundnessError("lasso evaluation: unhandled operator");
    }

    /// Value iteration on the lasso graph: least fixpoint when `least`,
    /// greatest otherwise. Converges because the successor graph is a lasso.
    template <typename Update>
    std::vector<char> fix(bool least, Update update) const {
        std::size_t n = positions();
        std::vector<char> val(n, least ? 0 : 1);
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t k = n; k-- > 0;) {
                char nv = update(k, val[succ(k)]);
                if (nv != val[k]) {
                    val[k] = nv;
                    changed = true;
                }
            }
        }
        return val;
    }
};

}  // namespace detail

/// Does u·v^ω satisfy f? Exact; v must be non-empty.
inline bool lasso_sat(const Word& u, const Word& v, const LtlFormula& f) {
    if (v.empty()) throw InputError("lasso period must be non-empty");
    for (Symbol s : u)
        if (!f.actions.contains(s)) throw InputError("lasso prefix leaves the action alphabet");
    for (Symbol s : v)
        if (!f.actions.contains(s)) throw InputError("lasso period leaves the action alphabet");
    detail::LassoEval ev{u.size(), v.size(), {}};
    ev.letters = u;
    ev.letters.insert(ev.letters.end(), v.begin(), v.end());
    return ev.eval(f.root)[0] != 0;
}

}  // namespace rmc::ltl
