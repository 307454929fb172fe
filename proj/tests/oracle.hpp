#pragma once

// Test-only oracles, independent of the library code paths they check.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cstdint>
#include <numeric>
#include <vector>

#include "sofic/presentation.hpp"
#include "sofic/word.hpp"

namespace oracle {

// Exact integer matrix power trace (periodic-point counting oracle).
using IMat = std::vector<std::vector<std::uint64_t>>;

inline IMat imat_mul(const IMat& a, const IMat& b) {
    const std::size_t n = a.size();
    IMat c(n, std::vector<std::uint64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (!a[i][k]) continue;
            for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
        }
    return c;
}

inline std::uint64_t imat_power_trace(const IMat& a, int p) {
    IMat acc = a;
    for (int i = 1; i < p; ++i) acc = imat_mul(acc, a);
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < a.size(); ++i) t += acc[i][i];
    return t;
}

// Dominant eigenvalue from a dense general eigensolver.
inline double dense_spectral_radius(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    double best = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        best = std::max(best, std::abs(es.eigenvalues()[i]));
    return best;
}

// Exact rationals with 128-bit intermediates (enough for dyadic/ternary
// cylinder masses at the depths the tests use).
struct Rational {
    __int128 num = 0;
    __int128 den = 1;

    Rational() = default;
    Rational(__int128 n, __int128 d) : num(n), den(d) { normalize(); }

    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    void normalize() {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const __int128 g = gcd128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    Rational operator+(const Rational& o) const {
        return {num * o.den + o.num * den, den * o.den};
    }
    Rational operator-(const Rational& o) const {
        return {num * o.den - o.num * den, den * o.den};
    }
    Rational operator*(const Rational& o) const { return {num * o.num, den * o.den}; }
    Rational abs() const { return {num < 0 ? -num : num, den}; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Brute-force: all binary words of length len avoiding a forbidden factor.
inline std::vector<sofic::Word> words_avoiding(const std::vector<sofic::Word>& forbidden,
                                               std::size_t alphabet, std::size_t len) {
    std::vector<sofic::Word> out;
    std::vector<sofic::Sym> cur(len, 0);
    auto contains_forbidden = [&]() {
        for (const auto& f : forbidden) {
            if (f.size() > len) continue;
            for (std::size_t i = 0; i + f.size() <= len; ++i) {
                bool hit = true;
                for (std::size_t j = 0; j < f.size(); ++j)
                    if (cur[i + j] != f[j]) {
                        hit = false;
                        break;
                    }
                if (hit) return true;
            }
        }
        return false;
    };
    while (true) {
        if (!contains_forbidden()) out.push_back(sofic::Word(cur));
        std::size_t i = len;
        while (i > 0 && cur[i - 1] + 1u == alphabet) cur[--i] = 0;
        if (i == 0) break;
        cur[i - 1]++;
    }
    return out;
}

// Constructive specification witness: a periodic sequence of period
// |a| + gap1 + |b| + gap2 containing a at 0 and b at |a| + gap1, found by
// depth-first search over labeled closed paths.
inline bool has_periodic_connector(const sofic::SoficPresentation& p, const sofic::Word& a,
                                   const sofic::Word& b, int gap1, int gap2) {
    const int period = static_cast<int>(a.size() + b.size()) + gap1 + gap2;
    std::vector<int> want(static_cast<std::size_t>(period), -1);
    for (std::size_t i = 0; i < a.size(); ++i) want[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        want[a.size() + static_cast<std::size_t>(gap1) + i] = b[i];

    struct Dfs {
        const sofic::SoficPresentation& p;
        const std::vector<int>& want;
        int period;
        int home = 0;
        bool run(int v, int pos) {
            if (pos == period) return v == home;
            for (const auto& [label, dst] : p.out_edges(v)) {
                if (want[static_cast<std::size_t>(pos)] >= 0 &&
                    want[static_cast<std::size_t>(pos)] != label)
                    continue;
                if (run(dst, pos + 1)) return true;
            }
            return false;
        }
    };
    Dfs dfs{p, want, period};
    for (int v = 0; v < p.vertex_count(); ++v) {
        dfs.home = v;
        if (dfs.run(v, 0)) return true;
    }
    return false;
}

}  // namespace oracle
