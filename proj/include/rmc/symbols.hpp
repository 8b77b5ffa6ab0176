/* symbols.hpp -- interned symbols, alphabets and words shared by all automata. */

#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rmc {

using Symbol = std::uint32_t;
using State = std::uint32_t;
using Word = std::vector<Symbol>;

/// Malformed user input (bad file, unknown action, alphabet mismatch, ...).
class InputError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A certificate or internal invariant failed to validate. Must abort the run.
class SoundnessError : public std::logic_error {
    using std::logic_error::logic_error;
};

/// Process-wide intern table. Symbol 0 is the reserved padding symbol "_",
/// which never appears in user-declared alphabets. Pair symbols (used by
/// transducers) are interned on demand and remember their two components.
class SymbolTable {
public:
    static constexpr Symbol pad = 0;

    static SymbolTable& instance() {
        static SymbolTable table;
        return table;
    }

    /// Intern a user-visible symbol name. Rejects names that would collide
    /// with the pad symbol or the pair-symbol syntax.
    Symbol intern(std::string_view name) {
        if (name.empty()) throw InputError("empty symbol name");
        if (name == "_") throw InputError("symbol name '_' is reserved for padding");
        if (name.find('/') != std::string_view::npos ||
            name.find_first_of(" \t\r\n") != std::string_view::npos)
            throw InputError("symbol name contains reserved character: '" + std::string(name) + "'");
        return intern_raw(name);
    }

    std::optional<Symbol> find(std::string_view name) const {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = by_name_.find(std::string(name));
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

    std::string name(Symbol s) const {
        std::lock_guard<std::mutex> lock(mutex_);
        return names_.at(s);
    }

    /// Pair symbol for the two track components; either side may be the pad.
    Symbol pair(Symbol left, Symbol right) {
        std::lock_guard<std::mutex> lock(mutex_);
        const std::uint64_t key = (std::uint64_t(left) << 32) | right;
        auto it = pair_ids_.find(key);
        if (it != pair_ids_.end()) return it->second;
        std::string nm = names_.at(left) + "/" + names_.at(right);
        Symbol id = static_cast<Symbol>(names_.size());
        names_.push_back(std::move(nm));
        by_name_.emplace(names_.back(), id);
        pair_ids_.emplace(key, id);
        pair_parts_.emplace(id, std::make_pair(left, right));
        return id;
    }

    std::optional<std::pair<Symbol, Symbol>> pair_parts(Symbol s) const {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = pair_parts_.find(s);
        if (it == pair_parts_.end()) return std::nullopt;
        return it->second;
    }

    /// A symbol guaranteed fresh (not interned before), derived from `base`.
    Symbol fresh(std::string_view base) {
        std::lock_guard<std::mutex> lock(mutex_);
        std::string candidate(base);
        while (by_name_.count(candidate)) candidate += "'";
        Symbol id = static_cast<Symbol>(names_.size());
        names_.push_back(candidate);
        by_name_.emplace(names_.back(), id);
        return id;
    }

private:
    SymbolTable() {
        names_.push_back("_");
        by_name_.emplace("_", pad);
    }

    Symbol intern_raw(std::string_view name) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = by_name_.find(std::string(name));
        if (it != by_name_.end()) return it->second;
        Symbol id = static_cast<Symbol>(names_.size());
        names_.emplace_back(name);
        by_name_.emplace(names_.back(), id);
        return id;
    }

    mutable std::mutex mutex_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, Symbol> by_name_;
    std::unordered_map<std::uint64_t, Symbol> pair_ids_;
    std::unordered_map<Symbol, std::pair<Symbol, Symbol>> pair_parts_;
};

inline Symbol intern(std::string_view name) { return SymbolTable::instance().intern(name); }
inline std::string symbol_name(Symbol s) { return SymbolTable::instance().name(s); }
inline Symbol pair_symbol(Symbol l, Symbol r) { return SymbolTable::instance().pair(l, r); }

/// Finite, non-empty in all real uses, stored sorted and duplicate-free.
class Alphabet {
public:
    Alphabet() = default;

    explicit Alphabet(std::vector<Symbol> symbols) : syms_(std::move(symbols)) {
        std::sort(syms_.begin(), syms_.end());
        syms_.erase(std::unique(syms_.begin(), syms_.end()), syms_.end());
    }

    static Alphabet of_names(std::initializer_list<std::string_view> names) {
        std::vector<Symbol> syms;
        for (auto n : names) syms.push_back(intern(n));
        return Alphabet(std::move(syms));
    }

    static Alphabet of_names(const std::vector<std::string>& names) {
        std::vector<Symbol> syms;
        for (const auto& n : names) syms.push_back(intern(n));
        return Alphabet(std::move(syms));
    }

    bool contains(Symbol s) const {
        return std::binary_search(syms_.begin(), syms_.end(), s);
    }

    std::size_t size() const { return syms_.size(); }
    bool empty() const { return syms_.empty(); }
    const std::vector<Symbol>& symbols() const { return syms_; }
    auto begin() const { return syms_.begin(); }
    auto end() const { return syms_.end(); }

    bool operator==(const Alphabet& other) const = default;

    Alphabet unioned(const Alphabet& other) const {
        std::vector<Symbol> all(syms_);
        all.insert(all.end(), other.syms_.begin(), other.syms_.end());
        return Alphabet(std::move(all));
    }

private:
    std::vector<Symbol> syms_;
};

/// All valid convolution letters over `track`: both components in
/// track ∪ {pad}, except the all-pad letter.
inline Alphabet pair_alphabet(const Alphabet& track) {
    std::vector<Symbol> sides;
    sides.push_back(SymbolTable::pad);
    for (Symbol s : track) sides.push_back(s);
    std::vector<Symbol> out;
    for (Symbol l : sides)
        for (Symbol r : sides) {
            if (l == SymbolTable::pad && r == SymbolTable::pad) continue;
            out.push_back(pair_symbol(l, r));
        }
    return Alphabet(std::move(out));
}

inline std::string word_to_string(const Word& w, const char* sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out += sep;
        out += symbol_name(w[i]);
    }
    return out;
}

inline Word word_of_names(std::initializer_list<std::string_view> names) {
    Word w;
    for (auto n : names) w.push_back(intern(n));
    return w;
}

}  // namespace rmc
