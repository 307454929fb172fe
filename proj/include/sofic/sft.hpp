#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sofic/errors.hpp"
#include "sofic/presentation.hpp"
#include "sofic/word.hpp"

namespace sofic {

// Periodic points of a fixed period p+1, listed by their length-(p+1)
// generating words.
struct PeriodicSet {
    int period = 0;  // p+1
    std::vector<Word> points;
};

// Order-m finite-type approximation: the SFT determined by the admissible
// words of length m+1, presented as the overlap graph on those words
// (vertex = word, edge a -> b iff a(1:m) = b(0:m-1)).
class SftApproximation {
public:
    static SftApproximation build(const SoficPresentation& p, int m,
                                  const Budgets& budgets = {}) {
        if (m < 0) throw ValidationError("SFT order must be nonnegative");
        SftApproximation s;
        s.order_ = m;
        s.alphabet_ = p.alphabet();
        s.words_ = p.admissible_words(m, budgets);
        s.link();
        return s;
    }

    // SFT directly from a word list (test and tooling hook). Words must all
    // share length m+1 and be distinct.
    static SftApproximation from_words(Alphabet alphabet, int m, std::vector<Word> words) {
        SftApproximation s;
        s.order_ = m;
        s.alphabet_ = std::move(alphabet);
        std::sort(words.begin(), words.end());
        words.erase(std::unique(words.begin(), words.end()), words.end());
        for (const Word& w : words)
            if (static_cast<int>(w.size()) != m + 1)
                throw ValidationError("SFT word list must have uniform length m+1");
        s.words_ = std::move(words);
        s.link();
        return s;
    }

    int order() const { return order_; }
    const Alphabet& alphabet() const { return alphabet_; }
    const std::vector<Word>& words() const { return words_; }
    const std::vector<int>& successors(int i) const {
        return succ_[static_cast<std::size_t>(i)];
    }

    std::optional<int> word_index(const Word& w) const {
        auto it = std::lower_bound(words_.begin(), words_.end(), w);
        if (it != words_.end() && *it == w)
            return static_cast<int>(it - words_.begin());
        return std::nullopt;
    }

    // True iff w occurs in some point of the SFT. For |w| <= m this is a
    // prefix test against the defining words; longer words are checked
    // window by window.
    bool is_admissible(const Word& w) const {
        const std::size_t L = static_cast<std::size_t>(order_) + 1;
        if (w.empty()) return true;
        if (w.size() >= L) {
            for (std::size_t i = 0; i + L <= w.size(); ++i)
                if (!word_index(w.sub(i, i + L - 1))) return false;
            return true;
        }
        auto it = std::lower_bound(words_.begin(), words_.end(), w);
        return it != words_.end() && w.is_prefix_of(*it);
    }

    // Admissible words of length n+1 of this SFT, sorted. For n <= m these
    // coincide with the base subshift's words of that length.
    std::vector<Word> admissible_words(int n, const Budgets& budgets = {}) const {
        if (n < 0) throw ValidationError("admissible_words: negative depth");
        const int m = order_;
        if (n <= m) {
            std::vector<Word> out;
            for (const Word& w : words_) {
                Word pre = w.prefix(static_cast<std::size_t>(n) + 1);
                if (out.empty() || out.back() != pre) out.push_back(pre);
            }
            return out;  // prefixes of a sorted list arrive sorted
        }
        std::vector<Word> level = words_;
        std::vector<int> at;  // index of the trailing window in words_
        at.reserve(level.size());
        for (int i = 0; i < static_cast<int>(level.size()); ++i) at.push_back(i);
        for (int len = m + 1; len <= n; ++len) {
            std::vector<Word> next;
            std::vector<int> next_at;
            for (std::size_t i = 0; i < level.size(); ++i)
                for (int j : succ_[static_cast<std::size_t>(at[i])]) {
                    next.push_back(level[i].appended(words_[static_cast<std::size_t>(j)].back()));
                    next_at.push_back(j);
                }
            if (next.size() > budgets.max_words)
                throw BudgetExceeded("word enumeration at depth " + std::to_string(len) +
                                     " exceeds budget");
            level = std::move(next);
            at = std::move(next_at);
        }
        return level;  // extension preserves sorted order
    }

    // Number of closed paths of length `steps` in the overlap graph
    // (= number of periodic points of that period).
    std::uint64_t closed_path_count(int steps) const {
        const std::size_t W = words_.size();
        std::uint64_t total = 0;
        std::vector<std::uint64_t> cnt(W), nxt(W);
        for (std::size_t r = 0; r < W; ++r) {
            std::fill(cnt.begin(), cnt.end(), 0);
            cnt[r] = 1;
            for (int t = 0; t < steps; ++t) {
                std::fill(nxt.begin(), nxt.end(), 0);
                for (std::size_t i = 0; i < W; ++i) {
                    if (!cnt[i]) continue;
                    for (int j : succ_[i]) nxt[static_cast<std::size_t>(j)] += cnt[i];
                }
                cnt.swap(nxt);
            }
            total += cnt[r];
        }
        return total;
    }

    // All periodic points of period p+1, as generating words of length p+1,
    // sorted. The enumerated count is checked against the closed-path count
    // of the overlap matrix power.
    PeriodicSet enumerate_periodic(int p, const Budgets& budgets = {}) const {
        if (p < 0) throw ValidationError("period must be nonnegative");
        const int steps = p + 1;
        const std::size_t W = words_.size();
        if (W * static_cast<std::size_t>(steps) > budgets.max_words)
            throw PeriodTooLarge("periodic enumeration budget exceeded: " +
                                 std::to_string(W) + " words x period " +
                                 std::to_string(steps));
        const std::uint64_t expected = closed_path_count(steps);
        if (expected > budgets.max_words)
            throw PeriodTooLarge("periodic point count " + std::to_string(expected) +
                                 " exceeds budget");

        PeriodicSet out;
        out.period = steps;
        out.points.reserve(static_cast<std::size_t>(expected));
        // reach[t][v]: v reaches the current root in exactly t steps
        std::vector<BitVec> reach(static_cast<std::size_t>(steps) + 1, BitVec(W));
        std::vector<int> path;
        for (std::size_t root = 0; root < W; ++root) {
            for (auto& b : reach) b = BitVec(W);
            reach[0].set(root);
            for (int t = 1; t <= steps; ++t)
                for (std::size_t v = 0; v < W; ++v)
                    for (int j : succ_[v])
                        if (reach[static_cast<std::size_t>(t - 1)].test(
                                static_cast<std::size_t>(j))) {
                            reach[static_cast<std::size_t>(t)].set(v);
                            break;
                        }
            if (!reach[static_cast<std::size_t>(steps)].test(root)) continue;
            path.assign(1, static_cast<int>(root));
            dfs_closed(root, steps, reach, path, out.points);
        }
        if (out.points.size() != expected)
            throw ValidationError("periodic enumeration disagrees with the trace "
                                  "of the transition power (internal check)");
        std::sort(out.points.begin(), out.points.end());
        return out;
    }

private:
    void link() {
        if (words_.empty()) throw ValidationError("SFT has no admissible words");
        const std::size_t W = words_.size();
        succ_.assign(W, {});
        const std::size_t m = static_cast<std::size_t>(order_);
        // group words by their length-m prefix (match targets by overlap)
        std::map<Word, std::vector<int>> by_prefix;
        for (std::size_t j = 0; j < W; ++j)
            by_prefix[words_[j].prefix(m)].push_back(static_cast<int>(j));
        for (std::size_t i = 0; i < W; ++i) {
            Word tail = words_[i].suffix(m);
            auto it = by_prefix.find(tail);
            if (it != by_prefix.end()) succ_[i] = it->second;
        }
    }

    void dfs_closed(std::size_t root, int steps, const std::vector<BitVec>& reach,
                    std::vector<int>& path, std::vector<Word>& out) const {
        const int depth = static_cast<int>(path.size()) - 1;
        if (depth == steps) {
            if (static_cast<std::size_t>(path.back()) == root) {
                std::vector<Sym> syms(static_cast<std::size_t>(steps));
                for (int t = 0; t < steps; ++t)
                    syms[static_cast<std::size_t>(t)] =
                        words_[static_cast<std::size_t>(path[static_cast<std::size_t>(t)])]
                            .front();
                out.push_back(Word(std::move(syms)));
            }
            return;
        }
        const int remaining = steps - depth - 1;
        for (int j : succ_[static_cast<std::size_t>(path.back())]) {
            if (!reach[static_cast<std::size_t>(remaining)].test(static_cast<std::size_t>(j)))
                continue;
            path.push_back(j);
            dfs_closed(root, steps, reach, path, out);
            path.pop_back();
        }
    }

    int order_ = 0;
    Alphabet alphabet_;
    std::vector<Word> words_;
    std::vector<std::vector<int>> succ_;
};

}  // namespace sofic
