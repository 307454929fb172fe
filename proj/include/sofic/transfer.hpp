#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sofic/bracket.hpp"
#include "sofic/errors.hpp"
#include "sofic/potential.hpp"
#include "sofic/sft.hpp"
#include "sofic/word.hpp"

namespace sofic {

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Transfer matrix at depth n over an order-m SFT: indexed by the admissible
// words of length n+1, entry (a, b) = exp(phi^{n+1}(a b_last)) on allowed
// overlaps a(1:n) = b(0:n-1), zero elsewhere. Primitive with primitivity
// index at most l + n + 1 for a specification length l.
struct TransferMatrix {
    int order = 0;   // m
    int depth = 0;   // n
    std::vector<Word> index;
    SparseMat mat;
};

inline TransferMatrix build_transfer(const SftApproximation& sft, int n,
                                     const Potential& phi, const Budgets& budgets = {}) {
    // n = order - 1 is the minimal faithful depth: words of length n+1 with
    // transitions gated by admissibility of the joined (n+2)-word.
    if (n < sft.order() - 1)
        throw ValidationError("transfer depth n must be >= SFT order - 1");
    TransferMatrix t;
    t.order = sft.order();
    t.depth = n;
    t.index = sft.admissible_words(n, budgets);
    const auto dim = static_cast<Eigen::Index>(t.index.size());
    if (t.index.size() > budgets.dense_dim * budgets.dense_dim)
        throw BudgetExceeded("transfer index of size " + std::to_string(t.index.size()) +
                             " exceeds budget");

    std::map<Word, std::vector<int>> by_prefix;
    for (int j = 0; j < dim; ++j)
        by_prefix[t.index[static_cast<std::size_t>(j)].prefix(static_cast<std::size_t>(n))]
            .push_back(j);

    const bool gate = n < sft.order();  // overlap alone is not sufficient there
    std::vector<Eigen::Triplet<double>> trip;
    for (int i = 0; i < dim; ++i) {
        const Word& a = t.index[static_cast<std::size_t>(i)];
        auto it = by_prefix.find(a.suffix(static_cast<std::size_t>(n)));
        if (it == by_prefix.end()) continue;
        for (int j : it->second) {
            const Word& b = t.index[static_cast<std::size_t>(j)];
            const Word ab = a.appended(b.back());
            if (gate && !sft.is_admissible(ab)) continue;
            trip.emplace_back(i, j, std::exp(phi.finite_range(n + 1, ab)));
        }
    }
    t.mat.resize(dim, dim);
    t.mat.setFromTriplets(trip.begin(), trip.end());
    return t;
}

// Hilbert projective distance between strictly positive vectors:
// log(max_i x_i/y_i) - log(min_i x_i/y_i).
inline double projective_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size())
        throw ValidationError("projective distance needs equal-length vectors");
    if (x.size() == 0) throw ValidationError("projective distance of empty vectors");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw NonPositiveEntry("projective distance needs strictly positive entries");
        const double r = x[i] / y[i];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return std::log(hi) - std::log(lo);
}

struct GammaTau {
    double gamma = 0.0;  // min cross-ratio root; 0 when the matrix has a zero
    double tau = 1.0;    // (1 - gamma) / (1 + gamma)
};

// Birkhoff contraction coefficient of a nonnegative matrix. The min over
// index quadruples reduces to a min over row pairs of (min_j r_j / max_j r_j)
// with r_j the entrywise row ratio.
inline GammaTau gamma_tau(const Eigen::MatrixXd& M) {
    const Eigen::Index nr = M.rows(), nc = M.cols();
    for (Eigen::Index i = 0; i < nr; ++i)
        for (Eigen::Index j = 0; j < nc; ++j)
            if (!(M(i, j) > 0.0)) return {0.0, 1.0};
    double worst = 1.0;
    for (Eigen::Index i = 0; i < nr; ++i)
        for (Eigen::Index k = i + 1; k < nr; ++k) {
            double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
            for (Eigen::Index j = 0; j < nc; ++j) {
                const double r = M(i, j) / M(k, j);
                rmin = std::min(rmin, r);
                rmax = std::max(rmax, r);
            }
            worst = std::min(worst, rmin / rmax);
        }
    const double gamma = std::sqrt(worst);
    return {gamma, (1.0 - gamma) / (1.0 + gamma)};
}

// Perron eigendata with a certified sup-log error radius: rho within
// exp(+-err), v on the simplex and w with w.v = 1, each entry within a
// factor exp(+-err) of the true eigenvectors.
struct PerronData {
    double rho = 0.0;
    double log_rho = 0.0;
    Eigen::VectorXd v;
    Eigen::VectorXd w;
    double tau = 0.0;   // contraction coefficient of M^L
    int L = 1;          // primitivity power used for the certificate
    double err = 0.0;
    long matvecs = 0;
};

struct PerronOptions {
    double tol = 1e-13;
    long max_matvecs = 400000;
    std::size_t dense_tau_dim = 2000;
    std::optional<double> tau_bound;  // analytic fallback when dense power is too large
};

namespace detail {

// Smallest e >= lo with (support of M)^e > 0. The nominal transfer-matrix
// index l+n+1 can miss by a few steps when the approximating SFT needs
// parity-fixing gaps, so the certificate power is verified, not assumed.
inline int support_primitivity_exponent(const SparseMat& M, int lo, long cap) {
    const auto dim = static_cast<std::size_t>(M.rows());
    const std::size_t blocks = (dim + 63) / 64;
    std::vector<std::uint64_t> base(dim * blocks, 0), pow(dim * blocks, 0),
        next(dim * blocks, 0);
    for (int i = 0; i < M.rows(); ++i)
        for (SparseMat::InnerIterator it(M, i); it; ++it) {
            const auto j = static_cast<std::size_t>(it.col());
            base[static_cast<std::size_t>(i) * blocks + (j >> 6)] |= 1ull << (j & 63);
        }
    pow = base;
    auto full = [&]() {
        for (std::size_t i = 0; i < dim; ++i) {
            std::size_t cnt = 0;
            for (std::size_t b = 0; b < blocks; ++b)
                cnt += static_cast<std::size_t>(
                    __builtin_popcountll(pow[i * blocks + b]));
            if (cnt != dim) return false;
        }
        return true;
    };
    for (long e = 1; e <= cap; ++e) {
        if (e >= lo && full()) return static_cast<int>(e);
        std::fill(next.begin(), next.end(), 0);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t b = 0; b < blocks; ++b) {
                std::uint64_t bits = pow[i * blocks + b];
                while (bits) {
                    const std::size_t k =
                        b * 64 + static_cast<std::size_t>(__builtin_ctzll(bits));
                    bits &= bits - 1;
                    for (std::size_t bb = 0; bb < blocks; ++bb)
                        next[i * blocks + bb] |= base[k * blocks + bb];
                }
            }
        pow.swap(next);
    }
    throw NotPrimitive("matrix support has no positive power up to " + std::to_string(cap));
}

inline Eigen::VectorXd simplex_normalize(Eigen::VectorXd x) {
    const double s = x.sum();
    if (!(s > 0.0)) throw NonPositiveEntry("vector cannot be normalized to the simplex");
    return x / s;
}

// One projective step x -> Mx / |Mx|_1.
inline Eigen::VectorXd apply_step(const SparseMat& M, const Eigen::VectorXd& x) {
    Eigen::VectorXd y = M * x;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (!(y[i] > 0.0))
            throw NonPositiveEntry("matrix maps a positive vector to a non-positive one "
                                   "(zero row?)");
    return simplex_normalize(std::move(y));
}

inline double dense_tau_of_power(const SparseMat& M, int L) {
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(M.rows(), M.cols());
    for (int i = 0; i < L; ++i) {
        P = M * P;
        const double mx = P.maxCoeff();
        if (mx > 0) P /= mx;  // scale-invariant
    }
    return gamma_tau(P).tau;
}

struct SimplexIteration {
    Eigen::VectorXd fixed_point;
    double bound = 0.0;  // certified projective distance to the eigenvector
    long matvecs = 0;
};

// Power iteration on the simplex, stopped by the contraction certificate
// d(x, v_M) <= d_M(x) / (1 - tau) with d_M(x) = min(L d(x,Fx), d(x,F^L x)).
inline SimplexIteration iterate_simplex(const SparseMat& M, int L, double tau, double tol,
                                        long max_matvecs) {
    const auto dim = M.rows();
    Eigen::VectorXd x = Eigen::VectorXd::Constant(dim, 1.0 / static_cast<double>(dim));
    long used = 0;
    while (true) {
        Eigen::VectorXd x1 = apply_step(M, x);
        Eigen::VectorXd xl = x1;
        for (int i = 1; i < L; ++i) xl = apply_step(M, xl);
        used += L;
        const double d1 = projective_distance(x, x1);
        const double dl = projective_distance(x, xl);
        const double dm = std::min(static_cast<double>(L) * d1, dl);
        if (tau < 1.0) {
            const double bound = dm / (1.0 - tau);
            if (bound <= tol) return {std::move(xl), bound, used};
        }
        if (used >= max_matvecs)
            throw NoConvergence("power iteration budget exhausted (tau = " +
                                std::to_string(tau) + ", certified bound " +
                                std::to_string(tau < 1.0 ? dm / (1.0 - tau) : dm) + ")");
        x = std::move(xl);
    }
}

}  // namespace detail

// Certified Perron data for a primitive matrix. `prim_index` is an upper
// bound for the primitivity index (l + n + 1 for transfer matrices); the
// contraction coefficient of M^prim_index drives the stopping certificate.
inline PerronData perron(const SparseMat& M, int prim_index, const PerronOptions& opts = {}) {
    if (M.rows() != M.cols()) throw ValidationError("perron needs a square matrix");
    const auto dim = M.rows();
    if (dim == 0) throw ValidationError("perron of empty matrix");
    if (prim_index < 1) throw ValidationError("primitivity index must be >= 1");
    if (!(opts.tol > 0)) throw ValidationError("tolerance must be positive");

    PerronData out;
    if (dim == 1) {
        out.rho = M.coeff(0, 0);
        if (!(out.rho > 0)) throw NonPositiveEntry("1x1 matrix entry must be positive");
        out.log_rho = std::log(out.rho);
        out.v = Eigen::VectorXd::Ones(1);
        out.w = Eigen::VectorXd::Ones(1);
        out.tau = 0.0;
        out.L = 1;
        out.err = 0.0;
        return out;
    }

    const long cap = std::max<long>(4L * prim_index + 16, 64);
    const int L = detail::support_primitivity_exponent(M, prim_index, cap);
    double tau;
    if (opts.tau_bound) {
        tau = *opts.tau_bound;
    } else if (static_cast<std::size_t>(dim) <= opts.dense_tau_dim) {
        tau = detail::dense_tau_of_power(M, L);
    } else {
        throw BudgetExceeded("matrix too large for a dense contraction coefficient; "
                             "supply tau_bound");
    }

    auto right = detail::iterate_simplex(M, L, tau, opts.tol, opts.max_matvecs);
    SparseMat Mt = SparseMat(M.transpose());
    auto left = detail::iterate_simplex(Mt, L, tau, opts.tol, opts.max_matvecs);

    out.v = std::move(right.fixed_point);
    Eigen::VectorXd w = std::move(left.fixed_point);

    Eigen::VectorXd Mv = M * out.v;
    out.rho = Mv.sum();  // |Mv|_1 with |v|_1 = 1
    out.log_rho = std::log(out.rho);
    const double wv = w.dot(out.v);
    out.w = w / wv;

    Eigen::VectorXd wM = Mt * out.w;
    const double res_v = (Mv - out.rho * out.v).cwiseAbs().maxCoeff() /
                         std::min(out.rho, out.v.maxCoeff());
    const double res_w = (wM - out.rho * out.w).cwiseAbs().maxCoeff() /
                         std::min(out.rho, out.w.maxCoeff());

    out.tau = tau;
    out.L = L;
    out.err = opts.tol + 2.0 * std::max(right.bound, left.bound) + res_v + res_w;
    out.matvecs = right.matvecs + left.matvecs;
    return out;
}

// Estimate of M^k x from eigendata, never forming the k-th power:
// rho^k (w.x) v, with the certified multiplicative radius
// tau^{floor(k/L)} d_M(x)/(1 - tau) plus the eigendata uncertainty.
struct PowerEstimate {
    Eigen::VectorXd value;
    double log_radius = 0.0;
};

inline PowerEstimate power_estimate(const SparseMat& M, const PerronData& pd,
                                    const Eigen::VectorXd& x, long k) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(x[i] > 0.0)) throw NonPositiveEntry("power_estimate needs x > 0");
    Eigen::VectorXd x0 = detail::simplex_normalize(x);
    Eigen::VectorXd x1 = detail::apply_step(M, x0);
    Eigen::VectorXd xl = x1;
    for (int i = 1; i < pd.L; ++i) xl = detail::apply_step(M, xl);
    const double d1 = projective_distance(x0, x1);
    const double dl = projective_distance(x0, xl);
    const double dm = std::min(static_cast<double>(pd.L) * d1, dl);

    PowerEstimate est;
    const double contraction =
        pd.tau < 1.0
            ? std::pow(pd.tau, static_cast<double>(k / pd.L)) * dm / (1.0 - pd.tau)
            : std::numeric_limits<double>::infinity();
    est.log_radius = contraction + static_cast<double>(k + 2) * pd.err +
                     static_cast<double>(k + 2) * kLedgerUlp;
    const double log_coeff = static_cast<double>(k) * pd.log_rho + std::log(pd.w.dot(x));
    est.value = std::exp(log_coeff) * pd.v;
    return est;
}

}  // namespace sofic
