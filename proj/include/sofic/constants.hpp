#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sofic/errors.hpp"
#include "sofic/potential.hpp"
#include "sofic/presentation.hpp"
#include "sofic/word.hpp"

namespace sofic {

namespace detail {

inline double log_sum_exp(const std::vector<double>& xs) {
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    double mx = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - mx);
    return mx + std::log(s);
}

// min / max of S_{k-1} phi over the admissible cylinder [b], |b| = k,
// obtained by enumerating admissible continuations of length range-1.
inline std::pair<double, double> birkhoff_extremes(const SoficPresentation& p,
                                                   const Potential& phi, const Word& b) {
    const int k = static_cast<int>(b.size());
    const int ext_len = phi.range() - 1;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    struct Frame {
        BitVec states;
        Word word;
    };
    std::vector<Frame> stack;
    stack.push_back({p.run(b), b});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (static_cast<int>(f.word.size()) == k + ext_len) {
            const double s = phi.birkhoff_word(f.word, k - 1);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
            continue;
        }
        for (Sym a = 0; a < p.alphabet().size(); ++a) {
            BitVec t = p.subset_step(f.states, a);
            if (!t.any()) continue;
            stack.push_back({std::move(t), f.word.appended(a)});
        }
    }
    if (!std::isfinite(lo))
        throw WordNotAdmissible("cylinder extremes of a non-admissible word");
    return {lo, hi};
}

// Smallest m such that log_lhs(j) <= 0 for all j >= m. Assumes log_lhs is
// unimodal (polynomial growth against a geometric or stretched-geometric
// decay), so once the value is below 0 and past the peak it stays below.
// Returns the scan cap when not found (diagnostic quantities only).
template <class LogLhs>
inline double threshold_scan(LogLhs&& log_lhs, long cap = 4'000'000) {
    const double ninf = -std::numeric_limits<double>::infinity();
    double cur = log_lhs(0.0);
    for (long j = 0; j <= cap; ++j) {
        const double nxt = log_lhs(static_cast<double>(j + 1));
        if (cur <= 0.0 && (nxt == ninf || nxt < cur)) return static_cast<double>(j);
        cur = nxt;
    }
    return static_cast<double>(cap);
}

// j * log(theta) with the 0^0 = 1 convention.
inline double decay_term(double j, double theta) {
    if (theta <= 0.0) return j > 0 ? -std::numeric_limits<double>::infinity() : 0.0;
    return j * std::log(theta);
}

}  // namespace detail

// Constants extracted from the boundary-word comparison: a magic word of
// length k >= l+1, the gap weight eps_w built from exact Birkhoff extremes,
// and the geometric rate theta_X = (1 + eps_w)^{-1/k} with threshold
// m_X = 2k(k+l) and prefactor C_X = (#A e^{2 sup|phi|})^l e^{4 Lambda}.
struct MagicData {
    Word word;
    int k = 0;
    double eps_w = 0.0;
    double theta_x = 0.0;
    double m_x = 0.0;
    double c_x = 0.0;
    double log_c_x = 0.0;
};

inline MagicData magic_boundary_constants(const SoficPresentation& p, const Potential& phi,
                                          const Budgets& budgets = {}) {
    const int ell = p.specification_length();
    Word w = p.magic_word(budgets);
    // a magic word stays magic under follower extension; pad to length >= l+1
    const std::size_t want = static_cast<std::size_t>(std::max(ell + 1, 1));
    while (w.size() < want) {
        BitVec ends = w.empty() ? p.all_vertices() : p.run(w);
        int v = ends.first();
        if (v < 0) throw NoMagicWord("magic word has no admissible extension");
        w = w.appended(p.out_edges(v).front().first);
    }
    MagicData md;
    md.word = w;
    md.k = static_cast<int>(w.size());

    const double sup = phi.sup_norm();
    const double lambda = phi.lambda();
    const double log_a = std::log(static_cast<double>(p.alphabet().size()));

    const auto [w_min, w_max] = detail::birkhoff_extremes(p, phi, w);
    (void)w_max;
    std::vector<double> denom;
    for (const Word& b : p.admissible_words(md.k - 1, budgets)) {
        if (b == w) continue;
        denom.push_back(detail::birkhoff_extremes(p, phi, b).second);
    }
    const double log_denom = detail::log_sum_exp(denom);
    const double log_eps =
        w_min - log_denom - static_cast<double>(ell) * (log_a + 2.0 * sup);
    md.eps_w = std::exp(log_eps);

    md.theta_x = std::isinf(md.eps_w)
                     ? 0.0
                     : std::pow(1.0 + md.eps_w, -1.0 / static_cast<double>(md.k));
    md.m_x = 2.0 * md.k * (md.k + ell);
    md.log_c_x = static_cast<double>(ell) * (log_a + 2.0 * sup) + 4.0 * lambda;
    md.c_x = std::exp(md.log_c_x);
    return md;
}

// Every explicit constant appearing in the convergence, mixing and entropy
// bounds, assembled from (#A, sup|phi|, the variation envelope, l) exactly
// as the estimates prescribe. Loose by construction; reported as
// diagnostics next to the computed values.
struct ProofConstants {
    int ell = 0;
    MagicData magic;

    double sup_phi = 0.0;
    double lambda = 0.0;
    double lambda1 = 0.0;  // tail of variations from m = 1
    double c_var = 0.0;    // envelope constant C
    double theta_var = 0.0;  // envelope rate (0 for polynomial envelopes)

    double k0 = 1.0, log_k0 = 0.0;
    double k1 = 0.0;
    double c_elem = 0.0;     // elementary-measure prefactor
    double theta_elem = 0.0; // elementary-measure rate
    double c_p = 0.0, theta_p = 0.0, m_p = 0.0;
    double theta_ft = 0.5;
    double c_h = 0.0, theta_h = 0.0;
    double m_star = 0.0;
    double log_gamma_ft_exp = 0.0;  // log of e^{gamma_FT}, i.e. gamma_FT
    double theta_mix = 0.0;
    double s0 = 0.0;

    double log_theta_elem() const {
        return theta_elem > 0 ? std::log(theta_elem) : -std::numeric_limits<double>::infinity();
    }

    // integral-bound polynomials from the tail summation
    double poly_q(double x) const {
        if (theta_elem <= 0.0) return 0.0;
        const double l1 = std::log(theta_elem), l2 = l1 * l1, l3 = l2 * l1, l4 = l3 * l1;
        return -2.0 * x * (x * x + 3.0) / l1 + 6.0 * (x * x + 1.0) / l2 - 12.0 * x / l3 +
               12.0 / l4;
    }
    double poly_q_elem(double x) const {
        if (theta_elem <= 0.0) return 0.0;
        const double l1 = std::log(theta_elem), l2 = l1 * l1, l3 = l2 * l1;
        const double y = x + ell + 2.0;
        return -(y * y + 1.0) / l1 + 2.0 * y / l2 - 2.0 / l3;
    }
    double poly_q_x(double x) const {
        const double th = magic.theta_x;
        if (th <= 0.0) return 0.0;
        const double l1 = std::log(th), l2 = l1 * l1, l3 = l2 * l1;
        const double y = x + ell + 2.0;
        return -(y * y + 1.0) / l1 + 2.0 * y / l2 - 2.0 / l3;
    }
    double poly_q_ft(double m) const {
        double acc = (m + 3.0) * std::pow(2.0, ell / 2.0 + 3.0) + 2.0;
        if (theta_elem > 0.0)
            acc += 4.0 * c_elem * (std::pow(theta_elem, -(ell / 2.0 + 1.0)) * poly_q(m) +
                                   poly_q_elem(m) / theta_elem);
        if (magic.theta_x > 0.0) acc += 8.0 * c_x() * poly_q_x(m) / magic.theta_x;
        return acc;
    }
    double c_x() const { return magic.c_x; }

    // log of the mixing prefactor Q_mu(x)
    double log_q_mix(double x) const {
        if (theta_elem <= 0.0) return -std::numeric_limits<double>::infinity();
        const double y = 2.0 * x + ell + 1.0;
        return std::log(10.0) + std::log(c_elem) + 4.0 * log_gamma_ft_exp -
               (ell + 5.0) / 4.0 * std::log(theta_elem) + std::log(y * y + 1.0);
    }

    // Mixing bound Q_mu(sqrt(s)) theta_mix^{sqrt(s)}; 0 when the elementary
    // rate vanishes (exact product structure).
    double mixing_bound(double s) const {
        if (theta_elem <= 0.0) return 0.0;
        const double rs = std::sqrt(s);
        const double lb = log_q_mix(rs) + rs * std::log(theta_mix);
        return std::exp(lb);
    }

    double s_star(std::size_t len_a, std::size_t len_b) const {
        const double n = static_cast<double>(std::max(len_a, len_b)) - 1.0;
        return std::max(n * n / 4.0, s0);
    }
};

inline ProofConstants assemble_constants(const SoficPresentation& p, const Potential& phi,
                                         const Budgets& budgets = {}) {
    ProofConstants c;
    c.ell = p.specification_length();
    c.magic = magic_boundary_constants(p, phi, budgets);
    c.sup_phi = phi.sup_norm();
    c.lambda = phi.lambda();
    c.lambda1 = phi.var_tail(1);
    c.c_var = phi.variation().C;
    c.theta_var =
        phi.variation().kind == Variation::Kind::exponential ? phi.variation().theta : 0.0;

    const double log_a = std::log(static_cast<double>(p.alphabet().size()));
    c.log_k0 = c.ell * (c.c_var + log_a) + c.lambda1;
    c.k0 = std::exp(c.log_k0);
    c.k1 = 2.0 * ((c.ell + 1.0) * (log_a + c.c_var) + c.lambda1 + c.sup_phi);
    c.c_elem = 2.0 * (c.c_var + c.k0 * c.k1);
    c.theta_elem = std::max(1.0 - 1.0 / c.k0, c.theta_var);

    c.c_p = 2.0 * c.magic.c_x + c.c_elem * c.theta_elem * c.theta_elem + phi.var_tail(2);
    c.theta_p = std::max({c.theta_var, c.magic.theta_x, c.theta_elem});
    const double log_2cx = std::log(2.0) + c.magic.log_c_x;
    const double m0 = detail::threshold_scan([&](double j) {
        return log_2cx + std::log((j + 2.0) * (j + c.ell + 2.0) + 1.0) +
               detail::decay_term(j, c.magic.theta_x);
    });
    c.m_p = std::max(c.magic.m_x, m0);

    c.theta_ft = std::max({c.theta_elem, c.magic.theta_x, 0.5});
    c.c_h = (c.theta_p < 1.0 ? c.c_p / (1.0 - c.theta_p) : std::numeric_limits<double>::infinity()) +
            c.c_var;
    c.theta_h = c.theta_p;

    const double m_tilde = detail::threshold_scan([&](double j) {
        const double y = j + c.ell + 1.0;
        return std::log(4.0) + c.magic.log_c_x + std::log(y * y + 1.0) +
               detail::decay_term(j, c.magic.theta_x);
    });
    c.m_star = std::max(c.magic.m_x, m_tilde);

    double gamma = 4.0 * c.ell * (log_a + c.sup_phi) + 4.0 * c.lambda;
    if (c.magic.theta_x > 0.0)
        gamma += 4.0 * c.magic.c_x * c.poly_q_x(c.m_star) *
                 std::pow(c.magic.theta_x, c.m_star - 1.0);
    if (c.theta_elem > 0.0)
        gamma += 2.0 * c.c_elem * c.poly_q_elem(c.m_star) * std::pow(c.theta_elem, c.m_star);
    c.log_gamma_ft_exp = gamma;

    c.theta_mix = std::sqrt(c.theta_elem);
    if (c.theta_elem > 0.0) {
        const double lte = std::log(c.theta_elem);
        c.s0 = detail::threshold_scan([&](double j) {
            const double rj = std::sqrt(std::max(j, 0.0));
            const double y = 2.0 * rj + c.ell + 1.0;
            return std::log(5.0) + std::log(c.c_elem) + std::log(y * y + 1.0) +
                   (rj / 2.0 - (c.ell + 5.0) / 4.0) * lte;
        });
    }
    return c;
}

}  // namespace sofic
