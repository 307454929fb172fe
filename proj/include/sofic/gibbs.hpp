#pragma once

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "sofic/bracket.hpp"
#include "sofic/constants.hpp"
#include "sofic/errors.hpp"
#include "sofic/measure.hpp"
#include "sofic/potential.hpp"
#include "sofic/presentation.hpp"
#include "sofic/sft.hpp"
#include "sofic/transfer.hpp"

namespace sofic {

struct GibbsOptions {
    PerronOptions perron;
    Budgets budgets;
    double noise_floor = 1e-14;  // gaps below this are floating noise
    int jobs = 0;                // 0 = hardware concurrency
};

// expm1 with the exponent capped below overflow; certified radii can be
// astronomically loose at small depths, the cap keeps them finite.
inline double expm1_safe(double x) { return std::expm1(std::min(x, 700.0)); }

// Matrix depth used when none is requested: deep enough for the SFT order
// and the potential core, plus two letters of slack.
inline int default_depth(int m, const Potential& phi) {
    return std::max(m, phi.range() - 1) + 2;
}

// Period coupling for elementary-measure comparisons at depth n.
inline long default_period(int n, int ell) {
    return static_cast<long>(n + 1) * static_cast<long>(n + ell + 1);
}

// Certified multiplicative slack of the eigenvector product against the
// elementary measures at depth n+1 and period parameter p: the exponential
// envelope uses the closed form (p+1) C_elem theta_elem^{n+1}; polynomial
// envelopes keep the two-term pre-simplification shape.
inline double gibbs_log_radius(const ProofConstants& c, const Potential& phi, int n, long p) {
    if (phi.variation().kind == Variation::Kind::exponential) {
        if (c.theta_elem <= 0.0) return 0.0;
        return static_cast<double>(p + 1) * c.c_elem * std::pow(c.theta_elem, n + 1);
    }
    const double contraction = 1.0 - 1.0 / c.k0;
    const long block = n + c.ell + 1;
    return 2.0 * static_cast<double>(p + 1) * phi.var(n + 1) +
           2.0 * c.k0 * c.k1 * static_cast<double>(block) *
               std::pow(contraction, static_cast<double>((p + 1) / block));
}

// Atomic measure on the periodic points of period p+1, weighted by
// exp(S_p phi); cylinder masses by summation over supporting points, exact
// up to floating arithmetic.
inline CylinderMeasure elementary_measure(const SftApproximation& sft, int p,
                                          const Potential& phi, int max_len,
                                          const Budgets& budgets = {}) {
    PeriodicSet pts = sft.enumerate_periodic(p, budgets);
    if (pts.points.empty())
        throw ValidationError("no periodic points of period " + std::to_string(p + 1));
    std::vector<double> lw;
    lw.reserve(pts.points.size());
    for (const Word& b : pts.points) lw.push_back(phi.birkhoff_periodic(b, p));
    const double log_z = detail::log_sum_exp(lw);
    const double ledger = static_cast<double>(p + 8) * kLedgerUlp;

    CylinderMeasure mu(max_len, {sft.order(), -1, p, "elementary"});
    for (std::size_t i = 0; i < pts.points.size(); ++i) {
        const double weight = std::exp(lw[i] - log_z);
        const Word& b = pts.points[i];
        for (int len = 1; len <= max_len; ++len)
            mu.add(b.cyclic_window(0, static_cast<std::size_t>(len)), weight, ledger);
    }
    return mu;
}

// Elementary cylinder mass through the transfer matrix:
// M^{p+1}(a,a) / trace(M^{p+1}) with multiplicative slack
// exp(+-2(p+1) var_{n+1}).
inline ValueLogRadius elementary_via_trace(const SftApproximation& sft, int n, long p,
                                           const Potential& phi, const Word& a,
                                           const Budgets& budgets = {}) {
    if (n < sft.order() - 1)
        throw ValidationError("trace formula needs n >= SFT order - 1");
    if (p < n) throw ValidationError("trace formula needs p >= n");
    TransferMatrix t = build_transfer(sft, n, phi, budgets);
    const auto dim = t.mat.rows();
    if (static_cast<std::size_t>(dim) > budgets.dense_dim)
        throw BudgetExceeded("dense matrix power of dimension " + std::to_string(dim) +
                             " exceeds budget");
    auto it = std::lower_bound(t.index.begin(), t.index.end(), a);
    if (it == t.index.end() || *it != a)
        throw WordNotAdmissible("word is not admissible at depth n");
    const auto ia = static_cast<Eigen::Index>(it - t.index.begin());

    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(dim, dim);
    for (long i = 0; i <= p; ++i) {
        P = t.mat * P;
        const double mx = P.maxCoeff();
        if (mx > 0) P /= mx;  // diagonal/trace ratio is scale-invariant
    }
    const double value = P(ia, ia) / P.trace();
    const double slack = 2.0 * static_cast<double>(p + 1) * phi.var(n + 1) +
                         static_cast<double>(p + 8) * kLedgerUlp;
    return {value, slack};
}

// Gibbs cylinder masses at depth n+1 from Perron data: mu[a] = w(a) v(a),
// marginalized down to shorter words, with the certified slack of
// gibbs_log_radius at the coupled period.
inline CylinderMeasure gibbs_cylinder(const SftApproximation& sft, int n, const Potential& phi,
                                      const TransferMatrix& t, const PerronData& pd,
                                      const ProofConstants& c) {
    const long p = default_period(n, c.ell);
    const double base = gibbs_log_radius(c, phi, n, p) + 2.0 * pd.err;
    CylinderMeasure mu(n + 1, {sft.order(), n, p, "eigen-product"});
    for (std::size_t i = 0; i < t.index.size(); ++i) {
        const auto ei = static_cast<Eigen::Index>(i);
        mu.set(t.index[i], pd.w[ei] * pd.v[ei], base + kLedgerUlp);
    }
    for (int len = n + 1; len >= 2; --len)
        for (const auto& [w, e] : mu.level(len))
            mu.add(w.prefix(static_cast<std::size_t>(len) - 1), e.value, e.log_radius);
    return mu;
}

// Exact stationary Markov extension of the transfer chain to depth N+1:
// mu[u] = w(u(0:n)) prod_j M(u_j, u_{j+1})/rho v(u(N-n:N)).
inline CylinderMeasure markov_extend(const SftApproximation& sft, int n, const Potential& phi,
                                     const TransferMatrix& t, const PerronData& pd,
                                     const ProofConstants& c, int N,
                                     const Budgets& budgets = {}) {
    if (N < n) throw ValidationError("markov_extend needs N >= n");
    const long p = default_period(n, c.ell);
    const double base = gibbs_log_radius(c, phi, n, p) + 2.0 * pd.err;
    CylinderMeasure mu(N + 1, {sft.order(), n, p, "markov"});

    struct Path {
        Word word;
        int state;
        double log_mass;
    };
    std::vector<Path> level;
    level.reserve(t.index.size());
    for (std::size_t i = 0; i < t.index.size(); ++i) {
        const auto ei = static_cast<Eigen::Index>(i);
        level.push_back({t.index[i], static_cast<int>(i),
                         std::log(pd.w[ei]) + std::log(pd.v[ei])});
    }
    for (int len = n + 2; len <= N + 1; ++len) {
        std::vector<Path> next;
        for (const Path& path : level) {
            const double lm = path.log_mass - std::log(pd.v[path.state]);
            for (SparseMat::InnerIterator it(t.mat, path.state); it; ++it) {
                const auto j = it.col();
                next.push_back({path.word.appended(t.index[static_cast<std::size_t>(j)].back()),
                                static_cast<int>(j),
                                lm + std::log(it.value()) - pd.log_rho + std::log(pd.v[j])});
            }
        }
        if (next.size() > budgets.max_words)
            throw BudgetExceeded("markov extension exceeds the word budget at length " +
                                 std::to_string(len));
        level = std::move(next);
    }
    const double deep = base + static_cast<double>(N - n + 2) * pd.err +
                        static_cast<double>(N + 8) * kLedgerUlp;
    for (const Path& path : level) mu.set(path.word, std::exp(path.log_mass), deep);
    for (int len = N + 1; len >= 2; --len)
        for (const auto& [w, e] : mu.level(len))
            mu.add(w.prefix(static_cast<std::size_t>(len) - 1), e.value, e.log_radius);
    return mu;
}

// Topological pressure of the approximating SFT: log rho with the variation
// tail as certified radius.
struct PressureEstimate {
    double value = 0.0;
    double radius = 0.0;
    int m = -1;
    int n = -1;

    Bracket bracket() const { return {value - radius, value + radius}; }
};

inline PressureEstimate pressure(const SftApproximation& sft, int n, const Potential& phi,
                                 const PerronData& pd) {
    PressureEstimate est;
    est.value = pd.log_rho;
    est.radius = phi.var_tail(n + 1) + pd.err + 8.0 * kLedgerUlp;
    est.m = sft.order();
    est.n = n;
    return est;
}

// Convenience bundle: SFT + transfer + certified Perron data at one (m, n).
struct Approximation {
    SftApproximation sft;
    TransferMatrix transfer;
    PerronData perron_data;
    int n = 0;
};

inline Approximation approximate(const SoficPresentation& p, const Potential& phi, int m,
                                 const ProofConstants& c, const GibbsOptions& opts = {},
                                 std::optional<int> depth = std::nullopt) {
    Approximation a;
    a.sft = SftApproximation::build(p, m, opts.budgets);
    a.n = depth.value_or(default_depth(m, phi));
    a.transfer = build_transfer(a.sft, a.n, phi, opts.budgets);
    PerronOptions po = opts.perron;
    if (!po.tau_bound && static_cast<std::size_t>(a.transfer.mat.rows()) > po.dense_tau_dim)
        po.tau_bound = 1.0 - 1.0 / c.k0;  // analytic contraction fallback
    a.perron_data = perron(a.transfer.mat, c.ell + a.n + 1, po);
    return a;
}

// P(X_m) - P(X_{m+1}) with summed radii, clamped at 0 from below
// (the approximations are nested, so the gap is nonnegative).
inline Bracket pressure_gap(const SoficPresentation& p, const Potential& phi, int m,
                            const ProofConstants& c, const GibbsOptions& opts = {}) {
    Approximation am = approximate(p, phi, m, c, opts);
    Approximation am1 = approximate(p, phi, m + 1, c, opts);
    const PressureEstimate pm = pressure(am.sft, am.n, phi, am.perron_data);
    const PressureEstimate pm1 = pressure(am1.sft, am1.n, phi, am1.perron_data);
    const double diff = pm.value - pm1.value;
    const double rad = pm.radius + pm1.radius;
    return {std::max(0.0, diff - rad), std::max(0.0, diff + rad)};
}

// Extremes of mu[a(0:k)] / exp(S_k^max phi(a) - (k+1) P) over all covered
// words of length <= N+1. Both finite and positive certifies the Gibbs
// inequality to this depth.
inline std::pair<double, double> gibbs_ratio_certificate(const CylinderMeasure& mu,
                                                         const Potential& phi,
                                                         const PressureEstimate& pr, int N) {
    if (mu.max_len() < N + 1)
        throw DepthMismatch("certificate depth exceeds measure coverage");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int len = 1; len <= N + 1; ++len) {
        const int k = len - 1;
        for (const auto& [a, e] : mu.level(len)) {
            if (e.value <= 0.0) continue;
            const double s = phi.birkhoff_max(a, k);
            const double ratio = e.value / std::exp(s - (k + 1) * pr.value);
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    }
    return {lo, hi};
}

// Correlation defect |mu([a] cap T^{-s}[b]) / (mu[a] mu[b]) - 1| for the
// stationary transfer chain, with the assembled mixing bound as diagnostic.
struct MixingResult {
    double ratio_minus_1 = 0.0;
    double radius = 0.0;
    double bound = 0.0;    // Q_mix(sqrt(s)) theta_mix^{sqrt(s)}
    double s_star = 0.0;   // bound validity threshold
    bool direct = false;   // overlapping cylinders, summed directly
};

namespace detail {

// Probability that the chain realizes all position constraints
// (-1 = free). Forward pass over chain states.
inline double constrained_mass(const TransferMatrix& t, const PerronData& pd,
                               const std::vector<int>& constraint) {
    const int n = t.depth;
    const int L = static_cast<int>(constraint.size());
    const auto dim = static_cast<std::size_t>(t.index.size());
    auto matches = [&](std::size_t state, int offset) {
        const Word& c = t.index[state];
        for (int j = 0; j <= n; ++j) {
            const int want = constraint[static_cast<std::size_t>(offset + j)];
            if (want >= 0 && c[static_cast<std::size_t>(j)] != static_cast<Sym>(want))
                return false;
        }
        return true;
    };
    std::vector<double> f(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
        if (matches(i, 0)) f[i] = pd.w[static_cast<Eigen::Index>(i)];
    for (int tpos = 1; tpos + n < L; ++tpos) {
        std::vector<double> g(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            if (f[i] == 0.0) continue;
            for (SparseMat::InnerIterator it(t.mat, static_cast<int>(i)); it; ++it) {
                const auto j = static_cast<std::size_t>(it.col());
                if (matches(j, tpos)) g[j] += f[i] * it.value() / pd.rho;
            }
        }
        f = std::move(g);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < dim; ++i) total += f[i] * pd.v[static_cast<Eigen::Index>(i)];
    return total;
}

}  // namespace detail

inline MixingResult mixing_ratio(const SftApproximation& sft, int n, const Potential& phi,
                                 const TransferMatrix& t, const PerronData& pd,
                                 const ProofConstants& c, const Word& a, const Word& b,
                                 long s) {
    if (s < 0) throw GapTooSmall("gap must be nonnegative");
    if (a.empty() || b.empty()) throw ValidationError("mixing needs nonempty words");
    if (!sft.is_admissible(a) || !sft.is_admissible(b))
        throw WordNotAdmissible("mixing words must be admissible");

    const int L = static_cast<int>(std::max<long>(s + static_cast<long>(b.size()),
                                                  static_cast<long>(n) + 1));
    std::vector<int> joint(static_cast<std::size_t>(L), -1);
    bool conflict = false;
    for (std::size_t i = 0; i < a.size(); ++i) joint[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) {
        auto& slot = joint[static_cast<std::size_t>(s) + i];
        if (slot >= 0 && slot != b[i]) conflict = true;
        slot = b[i];
    }
    auto single = [&](const Word& w) {
        const int lw = static_cast<int>(std::max<std::size_t>(w.size(),
                                                              static_cast<std::size_t>(n) + 1));
        std::vector<int> cons(static_cast<std::size_t>(lw), -1);
        for (std::size_t i = 0; i < w.size(); ++i) cons[i] = w[i];
        return detail::constrained_mass(t, pd, cons);
    };
    const double pa = single(a);
    const double pb = single(b);
    const double ev = conflict ? 0.0 : detail::constrained_mass(t, pd, joint);
    if (pa <= 0.0 || pb <= 0.0) throw WordNotAdmissible("word has zero chain mass");

    MixingResult r;
    const double ratio = ev / (pa * pb);
    r.ratio_minus_1 = std::abs(ratio - 1.0);
    const double lemma = gibbs_log_radius(c, phi, n, default_period(n, c.ell));
    const double arith = 3.0 * (static_cast<double>(L) * (pd.err + kLedgerUlp) + 2.0 * pd.err);
    r.radius = ratio * expm1_safe(3.0 * lemma + arith) + kLedgerUlp;
    r.bound = c.mixing_bound(static_cast<double>(s));
    r.s_star = c.s_star(a.size(), b.size());
    r.direct = s < static_cast<long>(a.size());
    return r;
}

// Variational entropy h = P(phi, X_m) - sum_a mu[a] phi^n(a), the direct
// route to the measure-theoretic entropy; radius folds the pressure radius,
// the variation at depth n and the measure's own slack.
inline ValueRadius entropy_variational(const SftApproximation& sft, int n, const Potential& phi,
                                       const PerronData& pd, const CylinderMeasure& mu) {
    if (mu.max_len() < n + 1)
        throw DepthMismatch("entropy needs the measure to cover depth n+1");
    const PressureEstimate pr = pressure(sft, n, phi, pd);
    double integral = 0.0, abs_integral = 0.0, sup_f = 0.0;
    for (const auto& [a, e] : mu.level(n + 1)) {
        const double f = phi.finite_range(n, a);
        integral += e.value * f;
        abs_integral += e.value * std::abs(f);
        sup_f = std::max(sup_f, std::abs(f));
    }
    // measure uncertainty enters through total variation, which is <= 2
    const double mu_slop =
        std::min(2.0 * sup_f, expm1_safe(mu.max_log_radius(n + 1)) * abs_integral);
    ValueRadius h;
    h.value = pr.value - integral;
    h.radius = pr.radius + phi.var(n) + mu_slop +
               static_cast<double>(n + 8) * kLedgerUlp;
    return h;
}

// Plain block average -(1/(N+1)) sum mu[a] log mu[a] at word length N+1.
// Biased at order 1/N for Markov measures; kept as the textbook diagnostic.
inline double block_entropy(const CylinderMeasure& mu, int N) {
    if (mu.max_len() < N + 1) throw DepthMismatch("block entropy depth not covered");
    double H = 0.0;
    for (const auto& [a, e] : mu.level(N + 1))
        if (e.value > 0.0) H -= e.value * std::log(e.value);
    return H / static_cast<double>(N + 1);
}

// Conditional block estimate H_{N+1} - H_N; exact for depth-n Markov
// measures once N > n, so it is the cross-check estimator.
inline double block_entropy_rate(const CylinderMeasure& mu, int N) {
    if (N < 1 || mu.max_len() < N + 1)
        throw DepthMismatch("block entropy rate needs lengths N and N+1");
    auto H = [&](int len) {
        double h = 0.0;
        for (const auto& [a, e] : mu.level(len))
            if (e.value > 0.0) h -= e.value * std::log(e.value);
        return h;
    };
    return H(N + 1) - H(N);
}

// Relative entropy h(nu | mu_psi) = P(psi, X') - int psi d nu - h(nu) for a
// measure nu supported inside the subshift of psi's Gibbs measure.
inline ValueRadius relative_entropy(const CylinderMeasure& nu, const ValueRadius& h_nu,
                                    const Potential& psi, const SftApproximation& larger,
                                    int n, const PerronData& pd_psi) {
    for (int len = 1; len <= nu.max_len(); ++len)
        for (const auto& [a, e] : nu.level(len))
            if (e.value > 1e-300 && !larger.is_admissible(a))
                throw SupportViolation("measure charges the word '" + std::to_string(len) +
                                       "-cylinder' outside the reference subshift");
    if (nu.max_len() < n + 1)
        throw DepthMismatch("relative entropy needs nu to cover depth n+1");
    const PressureEstimate pr = pressure(larger, n, psi, pd_psi);
    double integral = 0.0, abs_integral = 0.0, sup_f = 0.0;
    for (const auto& [a, e] : nu.level(n + 1)) {
        const double f = psi.finite_range(n, a);
        integral += e.value * f;
        abs_integral += e.value * std::abs(f);
        sup_f = std::max(sup_f, std::abs(f));
    }
    ValueRadius out;
    out.value = pr.value - integral - h_nu.value;
    out.radius = pr.radius + psi.var(n) + h_nu.radius +
                 std::min(2.0 * sup_f,
                          expm1_safe(nu.max_log_radius(n + 1)) * abs_integral) +
                 static_cast<double>(n + 8) * kLedgerUlp;
    if (out.value < 0.0 && out.value >= -out.radius) out.value = 0.0;  // clamped report
    return out;
}

// Least-squares fit of log(gap) against m, with sub-noise gaps excluded.
struct RateFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r2 = std::numeric_limits<double>::quiet_NaN();
    double rate = std::numeric_limits<double>::quiet_NaN();
    int points = 0;
};

inline RateFit fit_log_rate(const std::vector<std::pair<int, double>>& gaps,
                            double noise_floor) {
    std::vector<std::pair<double, double>> xy;
    for (auto [m, g] : gaps)
        if (g > noise_floor) xy.emplace_back(static_cast<double>(m), std::log(g));
    RateFit fit;
    fit.points = static_cast<int>(xy.size());
    if (xy.size() < 2) return fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : xy) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double k = static_cast<double>(xy.size());
    const double den = k * sxx - sx * sx;
    if (den == 0) return fit;
    fit.slope = (k * sxy - sx * sy) / den;
    fit.intercept = (sy - fit.slope * sx) / k;
    fit.rate = std::exp(fit.slope);
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / k;
    for (auto [x, y] : xy) {
        const double pred = fit.intercept + fit.slope * x;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

struct ConvergenceRow {
    int m = 0;
    int n = 0;
    Bracket distance;        // D(mu^m, mu^{m+1})
    Bracket pressure_gap;    // clamped at 0
    double entropy_gap = 0.0;
    double entropy_gap_radius = 0.0;
    double pressure_value = 0.0;
    double pressure_radius = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    RateFit pressure_fit;
    RateFit distance_fit;
    double theta_ft = 0.0;          // a-priori rate for comparison
    Bracket pressure_limit;         // last value minus the certified tail
    double apriori_tail = 0.0;
};

inline ConvergenceStudy convergence_study(const SoficPresentation& p, const Potential& phi,
                                          int m_lo, int m_hi, int K,
                                          const GibbsOptions& opts = {}) {
    if (m_lo < 0 || m_hi < m_lo) throw ValidationError("bad order range");
    const ProofConstants c = assemble_constants(p, phi, opts.budgets);

    struct Profile {
        PressureEstimate pr;
        ValueRadius h;
        CylinderMeasure mu;
        int n = 0;
    };
    auto profile = [&](int m) {
        Approximation a = approximate(p, phi, m, c, opts);
        Profile out;
        out.n = a.n;
        const int N = std::max(K, a.n);
        out.mu = markov_extend(a.sft, a.n, phi, a.transfer, a.perron_data, c, N, opts.budgets);
        out.pr = pressure(a.sft, a.n, phi, a.perron_data);
        out.h = entropy_variational(a.sft, a.n, phi, a.perron_data, out.mu);
        return out;
    };

    const int count = m_hi - m_lo + 2;  // profiles for m_lo .. m_hi+1
    std::vector<Profile> profiles(static_cast<std::size_t>(count));
    const int jobs = opts.jobs > 0 ? opts.jobs
                                   : std::max(1u, std::thread::hardware_concurrency());
    for (int base = 0; base < count; base += jobs) {
        std::vector<std::future<Profile>> batch;
        for (int i = base; i < std::min(count, base + jobs); ++i)
            batch.push_back(std::async(std::launch::async, profile, m_lo + i));
        for (int i = base; i < std::min(count, base + jobs); ++i)
            profiles[static_cast<std::size_t>(i)] = batch[static_cast<std::size_t>(i - base)].get();
    }

    ConvergenceStudy study;
    study.theta_ft = c.theta_ft;
    std::vector<std::pair<int, double>> pressure_gaps, distance_mids;
    for (int m = m_lo; m <= m_hi; ++m) {
        const Profile& a = profiles[static_cast<std::size_t>(m - m_lo)];
        const Profile& b = profiles[static_cast<std::size_t>(m - m_lo + 1)];
        ConvergenceRow row;
        row.m = m;
        row.n = a.n;
        row.distance = weak_distance(a.mu, b.mu, K);
        const double diff = a.pr.value - b.pr.value;
        const double rad = a.pr.radius + b.pr.radius;
        row.pressure_gap = {std::max(0.0, diff - rad), std::max(0.0, diff + rad)};
        row.entropy_gap = std::abs(a.h.value - b.h.value);
        row.entropy_gap_radius = a.h.radius + b.h.radius;
        row.pressure_value = a.pr.value;
        row.pressure_radius = a.pr.radius;
        study.rows.push_back(row);
        pressure_gaps.emplace_back(m, diff);
        distance_mids.emplace_back(m, row.distance.lo);
    }
    study.pressure_fit = fit_log_rate(pressure_gaps, opts.noise_floor);
    study.distance_fit = fit_log_rate(distance_mids, opts.noise_floor);

    const Profile& last = profiles[static_cast<std::size_t>(count - 1)];
    study.apriori_tail =
        c.theta_p < 1.0
            ? c.c_p * std::pow(c.theta_p, static_cast<double>(m_hi + 1)) / (1.0 - c.theta_p)
            : std::numeric_limits<double>::infinity();
    study.pressure_limit = {last.pr.value - study.apriori_tail - last.pr.radius,
                            last.pr.value + last.pr.radius};
    return study;
}

}  // namespace sofic
