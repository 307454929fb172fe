#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sofic/errors.hpp"
#include "sofic/word.hpp"

namespace sofic {

// Dynamic bitset sized at construction; used for vertex subsets.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), blocks_((n + 63) / 64, 0) {}

    void set(std::size_t i) { blocks_[i >> 6] |= (1ull << (i & 63)); }
    bool test(std::size_t i) const { return (blocks_[i >> 6] >> (i & 63)) & 1u; }
    std::size_t size() const { return n_; }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto b : blocks_) c += static_cast<std::size_t>(__builtin_popcountll(b));
        return c;
    }

    bool any() const {
        for (auto b : blocks_)
            if (b) return true;
        return false;
    }

    int first() const {
        for (std::size_t k = 0; k < blocks_.size(); ++k)
            if (blocks_[k]) return static_cast<int>(k * 64 +
                static_cast<std::size_t>(__builtin_ctzll(blocks_[k])));
        return -1;
    }

    BitVec& operator|=(const BitVec& o) {
        for (std::size_t k = 0; k < blocks_.size(); ++k) blocks_[k] |= o.blocks_[k];
        return *this;
    }

    bool operator==(const BitVec& o) const { return blocks_ == o.blocks_; }
    auto operator<=>(const BitVec& o) const { return blocks_ <=> o.blocks_; }

    std::size_t hash() const {
        std::size_t h = 14695981039346656037ull;
        for (auto b : blocks_) {
            h ^= b;
            h *= 1099511628211ull;
        }
        return h;
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            std::uint64_t b = blocks_[k];
            while (b) {
                std::size_t i = k * 64 + static_cast<std::size_t>(__builtin_ctzll(b));
                f(i);
                b &= b - 1;
            }
        }
    }

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> blocks_;
};

struct BitVecHash {
    std::size_t operator()(const BitVec& b) const { return b.hash(); }
};

// Right-resolving labeled graph presenting a sofic subshift. Immutable after
// construction. Validation enforces: no vertex emits two edges with the same
// label, every vertex has at least one outgoing and one incoming edge, and
// the unlabeled adjacency is primitive (irreducible + aperiodic).
class SoficPresentation {
public:
    struct Edge {
        int src;
        Sym label;
        int dst;
    };

    static SoficPresentation from_graph(Alphabet alphabet,
                                        std::vector<std::string> vertex_names,
                                        const std::vector<Edge>& edges) {
        SoficPresentation p;
        p.alphabet_ = std::move(alphabet);
        p.vertex_names_ = std::move(vertex_names);
        const int nv = static_cast<int>(p.vertex_names_.size());
        if (nv == 0) throw ValidationError("presentation has no vertices");
        p.out_.assign(static_cast<std::size_t>(nv), {});
        for (const Edge& e : edges) {
            if (e.src < 0 || e.src >= nv || e.dst < 0 || e.dst >= nv)
                throw ValidationError("edge endpoint out of range");
            if (e.label >= p.alphabet_.size())
                throw ValidationError("edge label out of range");
            p.out_[static_cast<std::size_t>(e.src)].push_back({e.label, e.dst});
        }
        p.finalize();
        return p;
    }

    // Compiles a forbidden-word list to the canonical presentation: prefix
    // automaton with suffix links, trimmed to its essential part, then
    // merged by follower-set equivalence.
    static SoficPresentation from_forbidden(const Alphabet& alphabet,
                                            const std::vector<Word>& forbidden);

    // Presentation of the beta-shift whose expansion of 1 is eventually
    // periodic: the digit sequence is `prefix` followed by the last `period`
    // digits of `prefix` repeating forever.
    static SoficPresentation beta_shift(const std::vector<int>& prefix, int period);

    const Alphabet& alphabet() const { return alphabet_; }
    int vertex_count() const { return static_cast<int>(vertex_names_.size()); }
    const std::string& vertex_name(int v) const {
        return vertex_names_[static_cast<std::size_t>(v)];
    }

    std::size_t edge_count() const {
        std::size_t c = 0;
        for (const auto& o : out_) c += o.size();
        return c;
    }

    std::optional<int> step(int v, Sym a) const {
        for (const auto& [label, dst] : out_[static_cast<std::size_t>(v)])
            if (label == a) return dst;
        return std::nullopt;
    }

    const std::vector<std::pair<Sym, int>>& out_edges(int v) const {
        return out_[static_cast<std::size_t>(v)];
    }

    // Subset step: image of a vertex set under one symbol (runs with no
    // a-edge are dropped).
    BitVec subset_step(const BitVec& s, Sym a) const {
        BitVec t(s.size());
        s.for_each([&](std::size_t v) {
            if (auto d = step(static_cast<int>(v), a)) t.set(static_cast<std::size_t>(*d));
        });
        return t;
    }

    BitVec all_vertices() const {
        BitVec s(static_cast<std::size_t>(vertex_count()));
        for (int v = 0; v < vertex_count(); ++v) s.set(static_cast<std::size_t>(v));
        return s;
    }

    // End-vertex set of all paths reading w, starting anywhere; empty iff w
    // is not admissible.
    BitVec run(const Word& w) const {
        BitVec s = all_vertices();
        for (Sym a : w.syms()) {
            s = subset_step(s, a);
            if (!s.any()) break;
        }
        return s;
    }

    bool is_admissible(const Word& w) const { return run(w).any(); }

    // All admissible words of length n+1, lexicographically sorted.
    std::vector<Word> admissible_words(int n, const Budgets& budgets = {}) const {
        if (n < 0) throw ValidationError("admissible_words: negative depth");
        std::map<Word, BitVec> level;
        for (int v = 0; v < vertex_count(); ++v)
            for (const auto& [a, d] : out_edges(v)) {
                auto [it, fresh] = level.try_emplace(Word({a}),
                                                     BitVec(static_cast<std::size_t>(vertex_count())));
                (void)fresh;
                it->second.set(static_cast<std::size_t>(d));
            }
        for (int len = 1; len <= n; ++len) {
            std::map<Word, BitVec> next;
            for (const auto& [w, ends] : level) {
                ends.for_each([&](std::size_t v) {
                    for (const auto& [a, d] : out_edges(static_cast<int>(v))) {
                        auto [it, fresh] = next.try_emplace(w.appended(a),
                            BitVec(static_cast<std::size_t>(vertex_count())));
                        (void)fresh;
                        it->second.set(static_cast<std::size_t>(d));
                    }
                });
                if (next.size() > budgets.max_words)
                    throw BudgetExceeded("admissible word enumeration exceeds budget of " +
                                         std::to_string(budgets.max_words));
            }
            level = std::move(next);
        }
        std::vector<Word> out;
        out.reserve(level.size());
        for (const auto& [w, ends] : level) out.push_back(w);
        return out;
    }

    // Shortest word whose runs all end at a single vertex (breadth-first
    // over the subset automaton, symbols in alphabet order, so the result
    // is the lexicographically least among the shortest).
    Word magic_word(const Budgets& budgets = {}) const {
        BitVec start = all_vertices();
        if (start.count() <= 1) return Word();
        std::unordered_map<BitVec, bool, BitVecHash> seen;
        std::deque<std::pair<BitVec, Word>> queue;
        seen.emplace(start, true);
        queue.emplace_back(start, Word());
        while (!queue.empty()) {
            auto [s, w] = std::move(queue.front());
            queue.pop_front();
            for (Sym a = 0; a < alphabet_.size(); ++a) {
                BitVec t = subset_step(s, a);
                if (!t.any()) continue;
                Word wa = w.appended(a);
                if (t.count() == 1) return wa;
                if (seen.emplace(t, true).second) {
                    if (seen.size() > budgets.magic_subsets)
                        throw NoMagicWord("subset search budget exhausted; "
                                          "presentation may be non-minimal");
                    queue.emplace_back(t, wa);
                }
            }
        }
        throw NoMagicWord("no synchronizing word exists for this presentation");
    }

    // Smallest l such that every power A^{k+1} of the unlabeled adjacency is
    // positive for k >= l. This certifies an upper bound for the
    // specification length.
    int specification_length() const { return primitivity_exponent_ - 1; }

    std::vector<std::vector<bool>> adjacency() const {
        const auto nv = static_cast<std::size_t>(vertex_count());
        std::vector<std::vector<bool>> a(nv, std::vector<bool>(nv, false));
        for (std::size_t v = 0; v < nv; ++v)
            for (const auto& [label, d] : out_[v]) a[v][static_cast<std::size_t>(d)] = true;
        return a;
    }

private:
    SoficPresentation() = default;

    void finalize() {
        const auto nv = static_cast<std::size_t>(vertex_count());
        std::vector<int> indeg(nv, 0);
        for (std::size_t v = 0; v < nv; ++v) {
            auto& edges = out_[v];
            std::sort(edges.begin(), edges.end());
            for (std::size_t i = 0; i + 1 < edges.size(); ++i)
                if (edges[i].first == edges[i + 1].first)
                    throw ValidationError("not right-resolving: vertex '" + vertex_names_[v] +
                                          "' has two out-edges labeled '" +
                                          alphabet_.name(edges[i].first) + "'");
            if (edges.empty())
                throw ValidationError("vertex '" + vertex_names_[v] + "' has no out-edge");
            for (const auto& [a, d] : edges) indeg[static_cast<std::size_t>(d)]++;
        }
        for (std::size_t v = 0; v < nv; ++v)
            if (indeg[v] == 0)
                throw ValidationError("vertex '" + vertex_names_[v] + "' has no in-edge");
        primitivity_exponent_ = compute_primitivity_exponent();
    }

    // Smallest e >= 1 with A^e > 0, or throws NotPrimitive past the Wielandt
    // bound n^2 - 2n + 2.
    int compute_primitivity_exponent() const {
        const auto nv = static_cast<std::size_t>(vertex_count());
        std::vector<BitVec> pow(nv, BitVec(nv)), base(nv, BitVec(nv));
        for (std::size_t v = 0; v < nv; ++v)
            for (const auto& [a, d] : out_[v]) {
                base[v].set(static_cast<std::size_t>(d));
                pow[v].set(static_cast<std::size_t>(d));
            }
        const long bound = static_cast<long>(nv) * static_cast<long>(nv) -
                           2 * static_cast<long>(nv) + 2;
        for (long e = 1; e <= std::max<long>(bound, 1); ++e) {
            bool all = true;
            for (std::size_t v = 0; v < nv && all; ++v) all = pow[v].count() == nv;
            if (all) return static_cast<int>(e);
            std::vector<BitVec> next(nv, BitVec(nv));
            for (std::size_t v = 0; v < nv; ++v)
                pow[v].for_each([&](std::size_t u) { next[v] |= base[u]; });
            pow = std::move(next);
        }
        throw NotPrimitive("adjacency has no positive power up to the Wielandt bound");
    }

    Alphabet alphabet_;
    std::vector<std::string> vertex_names_;
    std::vector<std::vector<std::pair<Sym, int>>> out_;
    int primitivity_exponent_ = 1;
};

namespace detail {

// Deterministic partial automaton used while compiling forbidden-word lists.
struct PartialDfa {
    std::size_t alphabet;
    // trans[v][a] = target or -1
    std::vector<std::vector<int>> trans;

    // Iteratively drop states without out-edges, then without in-edges.
    // Returns the surviving-state remap (or -1).
    std::vector<int> trim_essential() {
        const int n = static_cast<int>(trans.size());
        std::vector<bool> alive(static_cast<std::size_t>(n), true);
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<int> indeg(static_cast<std::size_t>(n), 0);
            for (int v = 0; v < n; ++v) {
                if (!alive[static_cast<std::size_t>(v)]) continue;
                bool has_out = false;
                for (std::size_t a = 0; a < alphabet; ++a) {
                    int d = trans[static_cast<std::size_t>(v)][a];
                    if (d >= 0 && alive[static_cast<std::size_t>(d)]) {
                        has_out = true;
                        indeg[static_cast<std::size_t>(d)]++;
                    }
                }
                if (!has_out) {
                    alive[static_cast<std::size_t>(v)] = false;
                    changed = true;
                }
            }
            for (int v = 0; v < n; ++v)
                if (alive[static_cast<std::size_t>(v)] && indeg[static_cast<std::size_t>(v)] == 0) {
                    alive[static_cast<std::size_t>(v)] = false;
                    changed = true;
                }
        }
        std::vector<int> remap(static_cast<std::size_t>(n), -1);
        int next = 0;
        for (int v = 0; v < n; ++v)
            if (alive[static_cast<std::size_t>(v)]) remap[static_cast<std::size_t>(v)] = next++;
        std::vector<std::vector<int>> tnew(static_cast<std::size_t>(next),
                                           std::vector<int>(alphabet, -1));
        for (int v = 0; v < n; ++v) {
            int rv = remap[static_cast<std::size_t>(v)];
            if (rv < 0) continue;
            for (std::size_t a = 0; a < alphabet; ++a) {
                int d = trans[static_cast<std::size_t>(v)][a];
                tnew[static_cast<std::size_t>(rv)][a] =
                    d >= 0 ? remap[static_cast<std::size_t>(d)] : -1;
            }
        }
        trans = std::move(tnew);
        return remap;
    }

    // Moore partition refinement; states with equal follower sets merge.
    void minimize() {
        const int n = static_cast<int>(trans.size());
        if (n == 0) return;
        // initial block = out-label signature
        std::vector<int> block(static_cast<std::size_t>(n), 0);
        {
            std::map<std::vector<bool>, int> sig2block;
            for (int v = 0; v < n; ++v) {
                std::vector<bool> sig(alphabet);
                for (std::size_t a = 0; a < alphabet; ++a)
                    sig[a] = trans[static_cast<std::size_t>(v)][a] >= 0;
                auto [it, fresh] = sig2block.try_emplace(sig, static_cast<int>(sig2block.size()));
                (void)fresh;
                block[static_cast<std::size_t>(v)] = it->second;
            }
        }
        while (true) {
            std::map<std::vector<int>, int> sig2block;
            std::vector<int> next(static_cast<std::size_t>(n));
            for (int v = 0; v < n; ++v) {
                std::vector<int> sig;
                sig.reserve(alphabet + 1);
                sig.push_back(block[static_cast<std::size_t>(v)]);
                for (std::size_t a = 0; a < alphabet; ++a) {
                    int d = trans[static_cast<std::size_t>(v)][a];
                    sig.push_back(d >= 0 ? block[static_cast<std::size_t>(d)] : -1);
                }
                auto [it, fresh] = sig2block.try_emplace(sig, static_cast<int>(sig2block.size()));
                (void)fresh;
                next[static_cast<std::size_t>(v)] = it->second;
            }
            bool stable = true;
            for (int v = 0; v < n && stable; ++v)
                stable = next[static_cast<std::size_t>(v)] == block[static_cast<std::size_t>(v)];
            block = std::move(next);
            if (stable) break;
        }
        int nblocks = *std::max_element(block.begin(), block.end()) + 1;
        std::vector<std::vector<int>> tnew(static_cast<std::size_t>(nblocks),
                                           std::vector<int>(alphabet, -1));
        for (int v = 0; v < n; ++v)
            for (std::size_t a = 0; a < alphabet; ++a) {
                int d = trans[static_cast<std::size_t>(v)][a];
                if (d >= 0)
                    tnew[static_cast<std::size_t>(block[static_cast<std::size_t>(v)])][a] =
                        block[static_cast<std::size_t>(d)];
            }
        trans = std::move(tnew);
    }
};

}  // namespace detail

inline SoficPresentation SoficPresentation::from_forbidden(const Alphabet& alphabet,
                                                           const std::vector<Word>& forbidden) {
    for (const Word& f : forbidden) {
        if (f.empty()) throw ValidationError("empty forbidden word forbids everything");
        for (Sym a : f.syms())
            if (a >= alphabet.size()) throw ValidationError("forbidden word uses unknown symbol");
    }

    // Prefix trie over proper prefixes of forbidden words; node 0 = empty word.
    struct Node {
        std::vector<int> child;
        int fail = 0;
        bool terminal = false;  // a forbidden word ends here
    };
    std::vector<Node> trie(1, Node{std::vector<int>(alphabet.size(), -1), 0, false});
    for (const Word& f : forbidden) {
        int v = 0;
        for (Sym a : f.syms()) {
            int& c = trie[static_cast<std::size_t>(v)].child[a];
            if (c < 0) {
                c = static_cast<int>(trie.size());
                trie.push_back(Node{std::vector<int>(alphabet.size(), -1), 0, false});
            }
            v = c;
        }
        trie[static_cast<std::size_t>(v)].terminal = true;
    }
    // suffix links + terminal propagation, breadth first
    std::deque<int> bfs;
    for (Sym a = 0; a < alphabet.size(); ++a) {
        int c = trie[0].child[a];
        if (c >= 0) {
            trie[static_cast<std::size_t>(c)].fail = 0;
            bfs.push_back(c);
        }
    }
    while (!bfs.empty()) {
        int v = bfs.front();
        bfs.pop_front();
        for (Sym a = 0; a < alphabet.size(); ++a) {
            int c = trie[static_cast<std::size_t>(v)].child[a];
            if (c < 0) continue;
            int f = trie[static_cast<std::size_t>(v)].fail;
            while (f != 0 && trie[static_cast<std::size_t>(f)].child[a] < 0)
                f = trie[static_cast<std::size_t>(f)].fail;
            int fc = trie[static_cast<std::size_t>(f)].child[a];
            int link = (fc >= 0 && fc != c) ? fc : 0;
            trie[static_cast<std::size_t>(c)].fail = link;
            trie[static_cast<std::size_t>(c)].terminal =
                trie[static_cast<std::size_t>(c)].terminal ||
                trie[static_cast<std::size_t>(link)].terminal;
            bfs.push_back(c);
        }
    }
    // deterministic transition function; transitions into terminal states die
    auto goto_state = [&](int v, Sym a) -> int {
        while (true) {
            int c = trie[static_cast<std::size_t>(v)].child[a];
            if (c >= 0) return c;
            if (v == 0) return 0;
            v = trie[static_cast<std::size_t>(v)].fail;
        }
    };
    detail::PartialDfa dfa;
    dfa.alphabet = alphabet.size();
    dfa.trans.assign(trie.size(), std::vector<int>(alphabet.size(), -1));
    for (int v = 0; v < static_cast<int>(trie.size()); ++v) {
        if (trie[static_cast<std::size_t>(v)].terminal) continue;
        for (Sym a = 0; a < alphabet.size(); ++a) {
            int d = goto_state(v, a);
            if (!trie[static_cast<std::size_t>(d)].terminal)
                dfa.trans[static_cast<std::size_t>(v)][a] = d;
        }
    }
    dfa.trim_essential();
    if (dfa.trans.empty())
        throw ValidationError("forbidden words leave an empty subshift");
    dfa.minimize();
    dfa.trim_essential();

    std::vector<std::string> names;
    for (std::size_t v = 0; v < dfa.trans.size(); ++v) names.push_back("q" + std::to_string(v));
    std::vector<Edge> edges;
    for (int v = 0; v < static_cast<int>(dfa.trans.size()); ++v)
        for (Sym a = 0; a < alphabet.size(); ++a) {
            int d = dfa.trans[static_cast<std::size_t>(v)][a];
            if (d >= 0) edges.push_back({v, a, d});
        }
    return from_graph(alphabet, std::move(names), edges);
}

inline SoficPresentation SoficPresentation::beta_shift(const std::vector<int>& prefix,
                                                       int period) {
    const int n = static_cast<int>(prefix.size());
    if (n == 0) throw ValidationError("beta expansion prefix is empty");
    if (period < 1 || period > n)
        throw ValidationError("beta expansion period must be in [1, prefix length]");
    for (int d : prefix)
        if (d < 0 || d > 9) throw ValidationError("beta expansion digits must be in 0..9");
    const int top = prefix[0];
    if (top < 1) throw ValidationError("beta expansion must start with a digit >= 1");
    for (int d : prefix)
        if (d > top) throw ValidationError("beta expansion digit exceeds leading digit");

    auto digit = [&](long i) -> int {
        if (i < n) return prefix[static_cast<std::size_t>(i)];
        return prefix[static_cast<std::size_t>(n - period + ((i - n) % period))];
    };
    // quasi-greedy validity: every shifted digit sequence is <= the original
    const long horizon = 2L * (n + period) + 4;
    for (long j = 1; j <= n + period; ++j) {
        for (long i = 0; i < horizon; ++i) {
            int a = digit(j + i), b = digit(i);
            if (a < b) break;
            if (a > b)
                throw ValidationError("digit sequence is not a valid (quasi-greedy) "
                                      "beta expansion");
        }
    }

    std::vector<std::string> symbols;
    for (int d = 0; d <= top; ++d) symbols.push_back(std::to_string(d));
    Alphabet alphabet(std::move(symbols));

    // state i = matched the expansion through position i
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        int ei = digit(i);
        int follow = (i + 1 < n) ? i + 1 : n - period;
        edges.push_back({i, static_cast<Sym>(ei), follow});
        for (int a = 0; a < ei; ++a) edges.push_back({i, static_cast<Sym>(a), 0});
    }
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("s" + std::to_string(i));
    return from_graph(std::move(alphabet), std::move(names), edges);
}

}  // namespace sofic
