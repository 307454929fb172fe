#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "sofic/errors.hpp"

namespace sofic {

// Symbol = index into an Alphabet.
using Sym = std::uint8_t;

// Finite word over an alphabet. Slices follow the inclusive convention:
// sub(i, j) is the word at positions i..j, of length j - i + 1.
class Word {
public:
    Word() = default;
    explicit Word(std::vector<Sym> syms) : syms_(std::move(syms)) {}

    static Word of(std::initializer_list<int> xs) {
        std::vector<Sym> s;
        s.reserve(xs.size());
        for (int x : xs) s.push_back(static_cast<Sym>(x));
        return Word(std::move(s));
    }

    std::size_t size() const noexcept { return syms_.size(); }
    bool empty() const noexcept { return syms_.empty(); }
    Sym operator[](std::size_t i) const { return syms_[i]; }
    Sym front() const { return syms_.front(); }
    Sym back() const { return syms_.back(); }

    // Inclusive slice; sub(i, i-1) yields the empty word.
    Word sub(std::size_t i, std::size_t j) const {
        if (j + 1 <= i) return Word();
        return Word(std::vector<Sym>(syms_.begin() + static_cast<long>(i),
                                     syms_.begin() + static_cast<long>(j) + 1));
    }

    Word prefix(std::size_t len) const { return len == 0 ? Word() : sub(0, len - 1); }
    Word suffix(std::size_t len) const {
        return len == 0 ? Word() : sub(size() - len, size() - 1);
    }

    Word appended(Sym a) const {
        std::vector<Sym> s = syms_;
        s.push_back(a);
        return Word(std::move(s));
    }

    Word operator+(const Word& o) const {
        std::vector<Sym> s = syms_;
        s.insert(s.end(), o.syms_.begin(), o.syms_.end());
        return Word(std::move(s));
    }

    // Window of `len` symbols starting at i in the periodic repetition of
    // this word.
    Word cyclic_window(std::size_t i, std::size_t len) const {
        std::vector<Sym> s(len);
        for (std::size_t j = 0; j < len; ++j) s[j] = syms_[(i + j) % syms_.size()];
        return Word(std::move(s));
    }

    bool is_prefix_of(const Word& o) const {
        if (size() > o.size()) return false;
        return std::equal(syms_.begin(), syms_.end(), o.syms_.begin());
    }

    const std::vector<Sym>& syms() const noexcept { return syms_; }

    auto operator<=>(const Word&) const = default;

private:
    std::vector<Sym> syms_;
};

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (Sym s : w.syms()) {
            h ^= s;
            h *= 1099511628211ull;
        }
        return h;
    }
};

// Ordered finite alphabet. Symbol order is the construction order and is
// total and stable; all word enumerations sort by it.
class Alphabet {
public:
    Alphabet() = default;

    explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
        if (names_.size() < 2)
            throw ValidationError("alphabet needs at least 2 symbols, got " +
                                  std::to_string(names_.size()));
        if (names_.size() > 200) throw ValidationError("alphabet too large");
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i].empty()) throw ValidationError("empty symbol name");
            for (std::size_t j = i + 1; j < names_.size(); ++j)
                if (names_[i] == names_[j])
                    throw ValidationError("duplicate symbol '" + names_[i] + "'");
        }
    }

    std::size_t size() const noexcept { return names_.size(); }
    const std::string& name(Sym a) const { return names_.at(a); }

    std::optional<Sym> index(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<Sym>(i);
        return std::nullopt;
    }

    std::string format(const Word& w) const {
        std::string out;
        for (Sym s : w.syms()) out += name(s);
        return out;
    }

    // Parses a word written as concatenated symbol names. Requires all
    // symbol names to be single characters (ambiguous otherwise).
    Word parse(const std::string& text) const {
        for (const auto& n : names_)
            if (n.size() != 1)
                throw ParseError("word parsing needs single-character symbols");
        std::vector<Sym> s;
        s.reserve(text.size());
        for (char c : text) {
            auto idx = index(std::string(1, c));
            if (!idx) throw WordNotAdmissible("symbol '" + std::string(1, c) +
                                              "' not in alphabet");
            s.push_back(*idx);
        }
        return Word(std::move(s));
    }

    bool operator==(const Alphabet& o) const { return names_ == o.names_; }

private:
    std::vector<std::string> names_;
};

}  // namespace sofic
