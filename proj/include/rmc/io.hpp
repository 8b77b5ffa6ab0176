/* io.hpp -- line-oriented text formats for automata, transducers, presented
 * systems and pushdown systems. Diff-friendly and bit-stable: writers emit a
 * canonical form, readers accept comments (#) and blank lines.
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rmc/nfa.hpp"
#include "rmc/pds.hpp"
#include "rmc/presentation.hpp"
#include "rmc/symbols.hpp"
#include "rmc/transducer.hpp"

namespace rmc {

namespace detail_io {

inline std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::vector<std::string> content_lines(std::istream& in) {
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (tokens(line).empty()) continue;
        out.push_back(line);
    }
    return out;
}

inline bool starts_with(const std::string& line, const std::string& key) {
    auto toks = tokens(line);
    return !toks.empty() && toks[0] == key;
}

inline std::vector<std::string> values_after(const std::string& line) {
    auto toks = tokens(line);
    toks.erase(toks.begin());
    return toks;
}

inline State parse_state(const std::string& tok, State num_states) {
    std::size_t pos = 0;
    unsigned long v = std::stoul(tok, &pos);
    if (pos != tok.size() || v >= num_states)
        throw InputError("state index out of range: " + tok);
    return static_cast<State>(v);
}

inline Symbol resolve(const std::string& name) {
    if (name == "_") return SymbolTable::pad;
    auto s = SymbolTable::instance().find(name);
    if (s) return *s;
    return SymbolTable::instance().intern(name);
}

}  // namespace detail_io

// --- finite automata --------------------------------------------------------

inline void write_nfa(std::ostream& out, const Nfa& a) {
    out << "alphabet:";
    for (Symbol s : a.alphabet) out << " " << symbol_name(s);
    out << "\n";
    out << "states: " << a.num_states << "\n";
    out << "initial:";
    for (State s : a.initials) out << " " << s;
    out << "\n";
    out << "final:";
    for (State s : a.finals) out << " " << s;
    out << "\n";
    for (const auto& t : a.transitions)
        out << t.src << " " << symbol_name(t.sym) << " " << t.dst << "\n";
}

inline Nfa read_nfa(std::istream& in) {
    auto lines = detail_io::content_lines(in);
    if (lines.size() < 4 || !detail_io::starts_with(lines[0], "alphabet:") ||
        !detail_io::starts_with(lines[1], "states:") ||
        !detail_io::starts_with(lines[2], "initial:") ||
        !detail_io::starts_with(lines[3], "final:"))
        throw InputError("automaton file must begin with alphabet/states/initial/final");
    std::vector<Symbol> syms;
    for (const auto& n : detail_io::values_after(lines[0]))
        syms.push_back(SymbolTable::instance().intern(n));
    Nfa a{Alphabet(std::move(syms))};
    auto states = detail_io::values_after(lines[1]);
    if (states.size() != 1) throw InputError("states: expects one count");
    a.num_states = static_cast<State>(std::stoul(states[0]));
    for (const auto& t : detail_io::values_after(lines[2]))
        a.add_initial(detail_io::parse_state(t, a.num_states));
    for (const auto& t : detail_io::values_after(lines[3]))
        a.add_final(detail_io::parse_state(t, a.num_states));
    for (std::size_t i = 4; i < lines.size(); ++i) {
        auto toks = detail_io::tokens(lines[i]);
        if (toks.size() != 3) throw InputError("transition line needs 'src sym dst': " + lines[i]);
        Symbol s = detail_io::resolve(toks[1]);
        if (!a.alphabet.contains(s))
            throw InputError("transition uses undeclared symbol " + toks[1]);
        a.add_transition(detail_io::parse_state(toks[0], a.num_states), s,
                         detail_io::parse_state(toks[2], a.num_states));
    }
    a.finish();
    return a;
}

// --- transducers -------------------------------------------------------------

inline void write_transducer(std::ostream& out, const Transducer& t) {
    out << "alphabet:";
    for (Symbol s : t.track) out << " " << symbol_name(s);
    out << "\n";
    out << "states: " << t.base.num_states << "\n";
    out << "initial:";
    for (State s : t.base.initials) out << " " << s;
    out << "\n";
    out << "final:";
    for (State s : t.base.finals) out << " " << s;
    out << "\n";
    for (const auto& tr : t.base.transitions) {
        auto parts = SymbolTable::instance().pair_parts(tr.sym);
        auto name = [](Symbol s) { return s == SymbolTable::pad ? std::string("_") : symbol_name(s); };
        out << tr.src << " " << name(parts->first) << "/" << name(parts->second) << " " << tr.dst
            << "\n";
    }
}

inline Transducer read_transducer(std::istream& in) {
    auto lines = detail_io::content_lines(in);
    if (lines.size() < 4 || !detail_io::starts_with(lines[0], "alphabet:") ||
        !detail_io::starts_with(lines[1], "states:") ||
        !detail_io::starts_with(lines[2], "initial:") ||
        !detail_io::starts_with(lines[3], "final:"))
        throw InputError("transducer file must begin with alphabet/states/initial/final");
    std::vector<Symbol> syms;
    for (const auto& n : detail_io::values_after(lines[0]))
        syms.push_back(SymbolTable::instance().intern(n));
    Alphabet track(std::move(syms));
    Nfa base{pair_alphabet(track)};
    base.num_states = static_cast<State>(std::stoul(detail_io::values_after(lines[1]).at(0)));
    for (const auto& t : detail_io::values_after(lines[2]))
        base.add_initial(detail_io::parse_state(t, base.num_states));
    for (const auto& t : detail_io::values_after(lines[3]))
        base.add_final(detail_io::parse_state(t, base.num_states));
    for (std::size_t i = 4; i < lines.size(); ++i) {
        auto toks = detail_io::tokens(lines[i]);
        if (toks.size() != 3)
            throw InputError("transducer line needs 'src l/r dst': " + lines[i]);
        auto slash = toks[1].find('/');
        if (slash == std::string::npos)
            throw InputError("transducer symbol needs the form l/r: " + toks[1]);
        Symbol l = detail_io::resolve(toks[1].substr(0, slash));
        Symbol r = detail_io::resolve(toks[1].substr(slash + 1));
        if (l == SymbolTable::pad && r == SymbolTable::pad)
            throw InputError("the all-pad letter _/_ is not allowed");
        auto check = [&](Symbol s) {
            if (s != SymbolTable::pad && !track.contains(s))
                throw InputError("transducer uses undeclared symbol in " + toks[1]);
        };
        check(l);
        check(r);
        base.add_transition(detail_io::parse_state(toks[0], base.num_states), pair_symbol(l, r),
                            detail_io::parse_state(toks[2], base.num_states));
    }
    base.finish();
    return normalize_convolutions({track, base});
}

// --- pushdown systems ---------------------------------------------------------

inline void write_pds(std::ostream& out, const Pds& p) {
    out << "actions:";
    for (Symbol s : p.actions) out << " " << symbol_name(s);
    out << "\n";
    out << "stack:";
    for (Symbol s : p.stack) out << " " << symbol_name(s);
    out << "\n";
    out << "controls:";
    for (Symbol s : p.controls) out << " " << symbol_name(s);
    out << "\n";
    for (const auto& r : p.rules) {
        out << symbol_name(r.control) << " " << symbol_name(r.top) << " " << symbol_name(r.action)
            << " " << symbol_name(r.next_control) << " ";
        if (r.push.empty()) {
            out << "-";
        } else {
            for (Symbol s : r.push) out << symbol_name(s);
        }
        out << "\n";
    }
}

inline Pds read_pds(std::istream& in) {
    auto lines = detail_io::content_lines(in);
    if (lines.size() < 3 || !detail_io::starts_with(lines[0], "actions:") ||
        !detail_io::starts_with(lines[1], "stack:") ||
        !detail_io::starts_with(lines[2], "controls:"))
        throw InputError("pushdown file must begin with actions/stack/controls");
    Pds p;
    {
        std::vector<Symbol> syms;
        for (const auto& n : detail_io::values_after(lines[0])) syms.push_back(detail_io::resolve(n));
        p.actions = Alphabet(std::move(syms));
    }
    {
        std::vector<Symbol> syms;
        for (const auto& n : detail_io::values_after(lines[1])) {
            if (n.size() != 1)
                throw InputError("stack symbols must be single characters (got '" + n + "')");
            syms.push_back(detail_io::resolve(n));
        }
        p.stack = Alphabet(std::move(syms));
    }
    {
        std::vector<Symbol> syms;
        for (const auto& n : detail_io::values_after(lines[2])) syms.push_back(detail_io::resolve(n));
        p.controls = Alphabet(std::move(syms));
    }
    for (std::size_t i = 3; i < lines.size(); ++i) {
        auto toks = detail_io::tokens(lines[i]);
        if (toks.size() != 5)
            throw InputError("rule line needs 'control top action control push': " + lines[i]);
        PdsRule r;
        r.control = detail_io::resolve(toks[0]);
        r.top = detail_io::resolve(toks[1]);
        r.action = detail_io::resolve(toks[2]);
        r.next_control = detail_io::resolve(toks[3]);
        if (toks[4] != "-")
            for (char c : toks[4]) r.push.push_back(detail_io::resolve(std::string(1, c)));
        p.rules.push_back(std::move(r));
    }
    return validate_pds(std::move(p));
}

// --- presented systems ----------------------------------------------------------

inline AutomaticPresentation read_presentation(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    auto lines = detail_io::content_lines(in);
    if (lines.empty() || !detail_io::starts_with(lines[0], "actions:"))
        throw InputError("presentation file must begin with actions:");
    AutomaticPresentation p;
    {
        std::vector<Symbol> syms;
        for (const auto& n : detail_io::values_after(lines[0]))
            syms.push_back(SymbolTable::instance().intern(n));
        p.actions = Alphabet(std::move(syms));
    }
    auto dir = path.parent_path();
    bool have_domain = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto toks = detail_io::tokens(lines[i]);
        if (toks[0] == "domain:" && toks.size() == 2) {
            std::ifstream f(dir / toks[1]);
            if (!f) throw InputError("cannot open domain file " + toks[1]);
            p.domain = read_nfa(f);
            have_domain = true;
        } else if (toks[0] == "rel" && toks.size() == 3 && toks[1].back() == ':') {
            Symbol a = detail_io::resolve(toks[1].substr(0, toks[1].size() - 1));
            std::ifstream f(dir / toks[2]);
            if (!f) throw InputError("cannot open relation file " + toks[2]);
            p.rel.emplace(a, read_transducer(f));
        } else {
            throw InputError("unrecognized presentation line: " + lines[i]);
        }
    }
    if (!have_domain) throw InputError("presentation file lacks a domain");
    return validate_presentation(std::move(p));
}

// --- explicit finite systems ------------------------------------------------------

/// Finite systems are stored as explicit node graphs; each node becomes a
/// one-letter state word.
inline AutomaticPresentation read_finite_system(std::istream& in) {
    auto lines = detail_io::content_lines(in);
    if (lines.size() < 2 || !detail_io::starts_with(lines[0], "actions:") ||
        !detail_io::starts_with(lines[1], "nodes:"))
        throw InputError("finite-system file must begin with actions/nodes");
    AutomaticPresentation p;
    {
        std::vector<Symbol> syms;
        for (const auto& n : detail_io::values_after(lines[0]))
            syms.push_back(SymbolTable::instance().intern(n));
        p.actions = Alphabet(std::move(syms));
    }
    std::vector<Symbol> nodes;
    for (const auto& n : detail_io::values_after(lines[1]))
        nodes.push_back(SymbolTable::instance().intern(n));
    Alphabet tr(nodes);
    {
        Nfa dom(tr);
        State i = dom.add_state(), f = dom.add_state();
        dom.add_initial(i);
        dom.add_final(f);
        for (Symbol s : tr) dom.add_transition(i, s, f);
        dom.finish();
        p.domain = dom;
    }
    std::map<Symbol, Nfa> bases;
    for (Symbol a : p.actions) bases.emplace(a, empty_nfa(pair_alphabet(tr)));
    for (std::size_t i = 2; i < lines.size(); ++i) {
        auto toks = detail_io::tokens(lines[i]);
        if (toks.size() != 3) throw InputError("edge line needs 'src action dst': " + lines[i]);
        Symbol src = detail_io::resolve(toks[0]);
        Symbol act = detail_io::resolve(toks[1]);
        Symbol dst = detail_io::resolve(toks[2]);
        if (!tr.contains(src) || !tr.contains(dst))
            throw InputError("edge uses an undeclared node: " + lines[i]);
        auto it = bases.find(act);
        if (it == bases.end()) throw InputError("edge uses an undeclared action: " + toks[1]);
        it->second = unite(it->second, singleton_nfa(pair_alphabet(tr), convolve({src}, {dst})));
    }
    for (Symbol a : p.actions)
        p.rel.emplace(a, normalize_convolutions(Transducer{tr, bases[a]}));
    return validate_presentation(std::move(p));
}

// --- model files -------------------------------------------------------------------

enum class ModelKind { Presentation, Pushdown, Finite };

struct ModelFile {
    ModelKind kind = ModelKind::Presentation;
    std::optional<Pds> pds;
    AutomaticPresentation presentation;
};

/// Detect the model kind by its marker lines: pushdown files declare a
/// stack, finite systems declare nodes, presentations name a domain file.
inline ModelFile load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<std::string> lines = detail_io::content_lines(in);
    bool has_stack = false, has_nodes = false, has_domain = false;
    for (const auto& l : lines) {
        if (detail_io::starts_with(l, "stack:")) has_stack = true;
        if (detail_io::starts_with(l, "nodes:")) has_nodes = true;
        if (detail_io::starts_with(l, "domain:")) has_domain = true;
    }
    ModelFile out;
    if (has_stack) {
        std::ifstream again(path);
        out.kind = ModelKind::Pushdown;
        out.pds = read_pds(again);
        out.presentation = validate_presentation(pds_to_presentation(*out.pds));
    } else if (has_nodes) {
        std::ifstream again(path);
        out.kind = ModelKind::Finite;
        out.presentation = read_finite_system(again);
    } else if (has_domain) {
        out.kind = ModelKind::Presentation;
        out.presentation = read_presentation(path);
    } else {
        throw InputError("cannot determine the model kind of " + path.string() +
                         " (no stack:/nodes:/domain: line)");
    }
    return out;
}

}  // namespace rmc
