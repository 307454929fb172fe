#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "sofic/errors.hpp"
#include "sofic/word.hpp"

namespace sofic {

// Certified variation envelope: var_m bounds the oscillation of the
// potential over cylinders of length m+1. Exponential: var_m = C theta^m.
// Polynomial: var_m = C (m+1)^{-alpha}, alpha > 4.
struct Variation {
    enum class Kind { exponential, polynomial };
    Kind kind = Kind::exponential;
    double C = 0.0;
    double theta = 0.0;  // exponential only, in [0,1)
    double alpha = 0.0;  // polynomial only, > 4

    static Variation exponential(double C, double theta) {
        if (C < 0) throw ValidationError("variation constant C must be >= 0");
        if (theta < 0 || theta >= 1) throw ValidationError("theta must be in [0,1)");
        return {Kind::exponential, C, theta, 0.0};
    }

    static Variation polynomial(double C, double alpha) {
        if (C < 0) throw ValidationError("variation constant C must be >= 0");
        if (alpha <= 4) throw ValidationError("polynomial variation needs alpha > 4");
        return {Kind::polynomial, C, 0.0, alpha};
    }

    double var(long m) const {
        if (kind == Kind::exponential) return m == 0 ? C : C * std::pow(theta, m);
        return C * std::pow(static_cast<double>(m + 1), -alpha);
    }

    // Certified upper bound for the tail sum_{j >= m} var_j.
    double tail(long m) const {
        if (kind == Kind::exponential) {
            if (theta == 0.0) return m == 0 ? C : 0.0;
            return C * std::pow(theta, m) / (1.0 - theta);
        }
        // partial term at m plus an integral bound on the rest
        double x = static_cast<double>(m + 1);
        return C * (std::pow(x, -alpha) + std::pow(x, 1.0 - alpha) / (alpha - 1.0));
    }

    // Certified upper bound for Lambda = sum_{m >= 0} var_m.
    double total() const {
        if (kind == Kind::exponential) return theta == 0.0 ? C : C / (1.0 - theta);
        double s = 0.0;
        const long M = 100000;
        for (long m = M - 1; m >= 0; --m) s += var(m);  // small-to-large summation
        return s + tail(M);
    }
};

// Potential with a locally constant core: the value at a point x is the core
// table entry of x(0:r-1). The table is expected to hold the cylinder maxima
// of the modeled function, so depth-n projections computed from it agree
// exactly with max over the infinite cylinder; the variation envelope feeds
// every derived bound.
class Potential {
public:
    Potential(Alphabet alphabet, int range, std::vector<double> table, Variation variation)
        : alphabet_(std::move(alphabet)),
          range_(range),
          table_(std::move(table)),
          variation_(variation) {
        if (range_ < 1) throw ValidationError("potential range must be >= 1");
        std::size_t expect = 1;
        for (int i = 0; i < range_; ++i) {
            expect *= alphabet_.size();
            if (expect > (1u << 24)) throw ValidationError("potential core table too large");
        }
        if (table_.size() != expect)
            throw ValidationError("core table needs " + std::to_string(expect) +
                                  " entries, got " + std::to_string(table_.size()));
        for (double v : table_)
            if (!std::isfinite(v)) throw ValidationError("core table entry not finite");
    }

    static Potential zero(const Alphabet& alphabet) {
        return Potential(alphabet, 1, std::vector<double>(alphabet.size(), 0.0),
                         Variation::exponential(0.0, 0.0));
    }

    // phi(x) = log p_{x(0)}; exact Gibbs data for product measures.
    static Potential log_bernoulli(const Alphabet& alphabet, const std::vector<double>& p) {
        if (p.size() != alphabet.size())
            throw ValidationError("log_bernoulli needs one probability per symbol");
        std::vector<double> t;
        for (double q : p) {
            if (q <= 0 || q >= 1) throw ValidationError("probabilities must be in (0,1)");
            t.push_back(std::log(q));
        }
        return Potential(alphabet, 1, std::move(t), Variation::exponential(0.0, 0.0));
    }

    const Alphabet& alphabet() const { return alphabet_; }
    int range() const { return range_; }
    const Variation& variation() const { return variation_; }

    double var(long m) const { return variation_.var(m); }
    double var_tail(long m) const { return variation_.tail(m); }
    double lambda() const { return variation_.total(); }
    double lambda_from(long m) const { return variation_.tail(m); }

    double sup_norm() const {
        double s = 0.0;
        for (double v : table_) s = std::max(s, std::abs(v));
        return s;
    }

    // Core value at the leading window of w; w must have length >= range.
    double core(const Word& w) const {
        std::size_t idx = 0;
        for (int i = 0; i < range_; ++i) {
            Sym a = w[static_cast<std::size_t>(i)];
            check_symbol(a);
            idx = idx * alphabet_.size() + a;
        }
        return table_[idx];
    }

    double core_shifted(const Word& w, std::size_t offset) const {
        std::size_t idx = 0;
        for (int i = 0; i < range_; ++i) {
            Sym a = w[offset + static_cast<std::size_t>(i)];
            idx = idx * alphabet_.size() + a;
        }
        return table_[idx];
    }

    // Depth-n projection phi^n(a) = max over the full-shift cylinder [a],
    // for a of length n+1. Exact (table lookup) once n+1 >= range; shorter
    // words maximize the core over all extensions.
    double finite_range(int n, const Word& a) const {
        if (n < 0) throw ValidationError("finite_range: negative depth");
        if (static_cast<int>(a.size()) != n + 1)
            throw ValidationError("finite_range: word length must be n+1");
        for (Sym s : a.syms()) check_symbol(s);
        if (n + 1 >= range_) return core(a);
        return max_core_extension(a);
    }

    // Birkhoff sum S_k phi along the periodic repetition of `generator`.
    double birkhoff_periodic(const Word& generator, int k) const {
        if (generator.empty()) throw ValidationError("empty periodic generator");
        for (Sym s : generator.syms()) check_symbol(s);
        double sum = 0.0;
        for (int i = 0; i <= k; ++i)
            sum += core(generator.cyclic_window(static_cast<std::size_t>(i),
                                                static_cast<std::size_t>(range_)));
        return sum;
    }

    // Birkhoff sum S_k phi of a finite word; needs |x| >= k + range so every
    // shifted window is determined.
    double birkhoff_word(const Word& x, int k) const {
        if (static_cast<long>(x.size()) < static_cast<long>(k) + range_)
            throw InsufficientContext("word of length " + std::to_string(x.size()) +
                                      " cannot evaluate S_" + std::to_string(k) +
                                      " for a range-" + std::to_string(range_) +
                                      " potential");
        for (Sym s : x.syms()) check_symbol(s);
        double sum = 0.0;
        for (int i = 0; i <= k; ++i) sum += core_shifted(x, static_cast<std::size_t>(i));
        return sum;
    }

    // max over full-shift extensions of S_k phi on the cylinder [a],
    // |a| = k+1. Windows protruding past the end are maximized jointly over
    // one tail extension of length range-1.
    double birkhoff_max(const Word& a, int k) const {
        if (static_cast<int>(a.size()) != k + 1)
            throw ValidationError("birkhoff_max: word length must be k+1");
        for (Sym s : a.syms()) check_symbol(s);
        double fixed = 0.0;
        const long L = static_cast<long>(a.size());
        for (long i = 0; i + range_ <= L; ++i)
            fixed += core_shifted(a, static_cast<std::size_t>(i));
        const int overhang = static_cast<int>(std::min<long>(k + 1, range_ - 1));
        if (overhang <= 0) return fixed;
        double best = -std::numeric_limits<double>::infinity();
        std::vector<Sym> ext(static_cast<std::size_t>(range_ - 1), 0);
        enumerate_tail(a, ext, 0, fixed, best);
        return best;
    }

    bool operator==(const Potential& o) const {
        return alphabet_ == o.alphabet_ && range_ == o.range_ && table_ == o.table_;
    }

private:
    void check_symbol(Sym a) const {
        if (a >= alphabet_.size())
            throw WordNotAdmissible("symbol index " + std::to_string(int(a)) +
                                    " outside alphabet of size " +
                                    std::to_string(alphabet_.size()));
    }

    double max_core_extension(const Word& a) const {
        const int missing = range_ - static_cast<int>(a.size());
        double best = -std::numeric_limits<double>::infinity();
        std::vector<Sym> ext(static_cast<std::size_t>(missing), 0);
        while (true) {
            Word full = a;
            for (Sym s : ext) full = full.appended(s);
            best = std::max(best, core(full));
            int i = missing - 1;
            while (i >= 0 && ext[static_cast<std::size_t>(i)] + 1u == alphabet_.size())
                ext[static_cast<std::size_t>(i--)] = 0;
            if (i < 0) break;
            ext[static_cast<std::size_t>(i)]++;
        }
        return best;
    }

    void enumerate_tail(const Word& a, std::vector<Sym>& ext, std::size_t pos, double fixed,
                        double& best) const {
        if (pos == ext.size()) {
            Word full = a;
            for (Sym s : ext) full = full.appended(s);
            double sum = fixed;
            const long L = static_cast<long>(a.size());
            for (long i = std::max<long>(0, L - range_ + 1); i < L; ++i)
                sum += core_shifted(full, static_cast<std::size_t>(i));
            best = std::max(best, sum);
            return;
        }
        for (Sym s = 0; s < alphabet_.size(); ++s) {
            ext[pos] = s;
            enumerate_tail(a, ext, pos + 1, fixed, best);
        }
    }

    Alphabet alphabet_;
    int range_;
    std::vector<double> table_;
    Variation variation_;
};

// Derived scalar data consumed by the transfer and measure layers.
struct PotentialConstants {
    double sup_norm = 0.0;
    double lambda = 0.0;        // certified upper bound on sum of variations
    double lambda_from_1 = 0.0; // tail from m = 1
    Variation variation;
};

inline PotentialConstants derived_constants(const Potential& phi) {
    PotentialConstants c;
    c.sup_norm = phi.sup_norm();
    c.lambda = phi.lambda();
    c.lambda_from_1 = phi.var_tail(1);
    c.variation = phi.variation();
    return c;
}

}  // namespace sofic
