#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sofic/bracket.hpp"
#include "sofic/errors.hpp"
#include "sofic/word.hpp"

namespace sofic {

// Cylinder masses word -> probability, each with a multiplicative log-error
// radius, organized by word length from 1 up to max_len. Absent words carry
// mass 0. Immutable use after filling; the producers tag provenance.
class CylinderMeasure {
public:
    struct Entry {
        double value = 0.0;
        double log_radius = 0.0;
    };

    struct Provenance {
        int m = -1;           // SFT order, when applicable
        int n = -1;           // transfer depth, when applicable
        long p = -1;          // period parameter, when applicable
        std::string method;   // "elementary", "eigen-product", "markov", ...
    };

    CylinderMeasure() = default;
    CylinderMeasure(int max_len, Provenance prov)
        : max_len_(max_len), levels_(static_cast<std::size_t>(max_len) + 1), prov_(std::move(prov)) {
        if (max_len < 1) throw ValidationError("cylinder measure needs max_len >= 1");
    }

    int max_len() const { return max_len_; }
    const Provenance& provenance() const { return prov_; }

    void set(const Word& w, double value, double log_radius) {
        level_mut(w).insert_or_assign(w, Entry{value, log_radius});
    }

    void add(const Word& w, double value, double log_radius) {
        auto& lvl = level_mut(w);
        auto [it, fresh] = lvl.try_emplace(w, Entry{0.0, 0.0});
        (void)fresh;
        it->second.value += value;
        it->second.log_radius = std::max(it->second.log_radius, log_radius) + kLedgerUlp;
    }

    double value(const Word& w) const {
        const auto* e = find(w);
        return e ? e->value : 0.0;
    }

    double log_radius(const Word& w) const {
        const auto* e = find(w);
        return e ? e->log_radius : 0.0;
    }

    Bracket bracket(const Word& w) const {
        const auto* e = find(w);
        if (!e) return {0.0, 0.0};
        return ValueLogRadius{e->value, e->log_radius}.bracket();
    }

    const std::map<Word, Entry>& level(int len) const {
        if (len < 1 || len > max_len_) throw DepthMismatch("measure does not cover length " +
                                                           std::to_string(len));
        return levels_[static_cast<std::size_t>(len)];
    }

    double level_sum(int len) const {
        double s = 0.0;
        for (const auto& [w, e] : level(len)) s += e.value;
        return s;
    }

    double max_log_radius(int len) const {
        double r = 0.0;
        for (const auto& [w, e] : level(len)) r = std::max(r, e.log_radius);
        return r;
    }

private:
    const Entry* find(const Word& w) const {
        const int len = static_cast<int>(w.size());
        if (len < 1 || len > max_len_) return nullptr;
        const auto& lvl = levels_[static_cast<std::size_t>(len)];
        auto it = lvl.find(w);
        return it == lvl.end() ? nullptr : &it->second;
    }

    std::map<Word, Entry>& level_mut(const Word& w) {
        const int len = static_cast<int>(w.size());
        if (len < 1 || len > max_len_)
            throw DepthMismatch("word length " + std::to_string(len) +
                                " outside measure depth " + std::to_string(max_len_));
        return levels_[static_cast<std::size_t>(len)];
    }

    int max_len_ = 0;
    std::vector<std::map<Word, Entry>> levels_;
    Provenance prov_;
};

// Weak distance D(mu, nu) = sum_m 2^{-(m+1)} sum_a |mu[a] - nu[a]| between
// the two stored measures, bracketed by truncation at cylinder length K+1:
// the tail contributes at most 2 per level, so hi = lo + 2^{-K}.
inline Bracket weak_distance(const CylinderMeasure& mu, const CylinderMeasure& nu, int K) {
    if (K < 0) throw ValidationError("weak distance cutoff must be >= 0");
    if (mu.max_len() < K + 1 || nu.max_len() < K + 1)
        throw DepthMismatch("weak distance at cutoff " + std::to_string(K) +
                            " needs both measures to depth " + std::to_string(K + 1));
    double truncated = 0.0;
    double slop = 0.0;
    for (int d = 0; d <= K; ++d) {
        const double weight = std::pow(2.0, -(d + 1));
        double lvl = 0.0;
        std::size_t terms = 0;
        auto itm = mu.level(d + 1).begin();
        auto itn = nu.level(d + 1).begin();
        const auto endm = mu.level(d + 1).end();
        const auto endn = nu.level(d + 1).end();
        while (itm != endm || itn != endn) {
            ++terms;
            if (itn == endn || (itm != endm && itm->first < itn->first)) {
                lvl += itm->second.value;
                ++itm;
            } else if (itm == endm || itn->first < itm->first) {
                lvl += itn->second.value;
                ++itn;
            } else {
                lvl += std::abs(itm->second.value - itn->second.value);
                ++itm;
                ++itn;
            }
        }
        truncated += weight * lvl;
        slop += weight * static_cast<double>(terms + 1) * kLedgerUlp;
    }
    const double tail = std::pow(2.0, -K);
    return {std::max(0.0, truncated - slop), truncated + slop + tail};
}

}  // namespace sofic
