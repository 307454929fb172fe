#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "sofic/transfer.hpp"

using namespace sofic;
using Catch::Approx;

namespace {

SparseMat dense_to_sparse(const Eigen::MatrixXd& d) {
    SparseMat s(d.rows(), d.cols());
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = 0; j < d.cols(); ++j)
            if (d(i, j) != 0.0) trip.emplace_back(i, j, d(i, j));
    s.setFromTriplets(trip.begin(), trip.end());
    return s;
}

Eigen::MatrixXd random_positive(std::mt19937& rng, int dim, double lo = 0.1, double hi = 10.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = dist(rng);
    return m;
}

Eigen::VectorXd random_positive_vector(std::mt19937& rng, int dim) {
    std::uniform_real_distribution<double> dist(0.05, 5.0);
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = dist(rng);
    return v;
}

const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

}  // namespace

TEST_CASE("transfer matrix construction") {
    SECTION("full shift at depth 0 with zero potential is all ones") {
        auto sft = SftApproximation::build(fixtures::full_shift(), 0);
        auto t = build_transfer(sft, 0, fixtures::zero_potential());
        REQUIRE(t.index.size() == 2);
        Eigen::MatrixXd d = Eigen::MatrixXd(t.mat);
        REQUIRE(d.isApprox(Eigen::MatrixXd::Ones(2, 2)));
    }

    SECTION("golden mean at minimal depth reproduces the letter matrix") {
        auto sft = SftApproximation::build(fixtures::golden_mean(), 1);
        auto t = build_transfer(sft, 0, fixtures::zero_potential());
        Eigen::MatrixXd d = Eigen::MatrixXd(t.mat);
        Eigen::MatrixXd expect(2, 2);
        expect << 1, 1, 1, 0;  // index order (0, 1)
        REQUIRE(d.isApprox(expect));
    }

    SECTION("Bernoulli rows carry the letter probabilities") {
        auto sft = SftApproximation::build(fixtures::full_shift(), 0);
        auto t = build_transfer(sft, 0, fixtures::bernoulli_13_23());
        Eigen::MatrixXd d = Eigen::MatrixXd(t.mat);
        REQUIRE(d(0, 0) == Approx(1.0 / 3.0));
        REQUIRE(d(0, 1) == Approx(1.0 / 3.0));
        REQUIRE(d(1, 0) == Approx(2.0 / 3.0));
        REQUIRE(d(1, 1) == Approx(2.0 / 3.0));
    }

    SECTION("deeper index agrees with the de Bruijn overlap rule") {
        auto sft = SftApproximation::build(fixtures::even_shift(), 2);
        auto t = build_transfer(sft, 3, fixtures::zero_potential());
        REQUIRE(t.index == sft.admissible_words(3));
        for (std::size_t i = 0; i < t.index.size(); ++i)
            for (std::size_t j = 0; j < t.index.size(); ++j) {
                const bool overlap = t.index[i].sub(1, 3) == t.index[j].sub(0, 2);
                REQUIRE((t.mat.coeff(static_cast<Eigen::Index>(i),
                                     static_cast<Eigen::Index>(j)) != 0.0) == overlap);
            }
    }

    SECTION("depth below order-1 is rejected") {
        auto sft = SftApproximation::build(fixtures::even_shift(), 2);
        REQUIRE_THROWS_AS(build_transfer(sft, 0, fixtures::zero_potential()),
                          ValidationError);
    }
}

TEST_CASE("Birkhoff coefficient") {
    SECTION("all-ones matrix has full cross-ratio") {
        auto gt = gamma_tau(Eigen::MatrixXd::Ones(3, 3));
        REQUIRE(gt.gamma == Approx(1.0));
        REQUIRE(gt.tau == Approx(0.0));
    }

    SECTION("a zero entry collapses gamma") {
        Eigen::MatrixXd m(2, 2);
        m << 1, 1, 1, 0;
        auto gt = gamma_tau(m);
        REQUIRE(gt.gamma == 0.0);
        REQUIRE(gt.tau == 1.0);
    }

    SECTION("worked 2x2") {
        Eigen::MatrixXd m(2, 2);
        m << 1, 2, 2, 1;
        auto gt = gamma_tau(m);
        REQUIRE(gt.gamma == Approx(0.5));
        REQUIRE(gt.tau == Approx(1.0 / 3.0));
    }

    SECTION("agrees with quadruple enumeration on random matrices") {
        std::mt19937 rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            const int dim = 2 + static_cast<int>(rng() % 4);
            Eigen::MatrixXd m = random_positive(rng, dim);
            double best = 1.0;
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    for (int k = 0; k < dim; ++k)
                        for (int l = 0; l < dim; ++l)
                            best = std::min(best,
                                            std::sqrt(m(i, j) * m(k, l) / (m(i, l) * m(k, j))));
            REQUIRE(gamma_tau(m).gamma == Approx(best));
        }
    }
}

TEST_CASE("projective distance") {
    Eigen::VectorXd x(2), y(2);
    x << 0.5, 0.5;
    y << 0.25, 0.75;
    REQUIRE(projective_distance(x, x) == 0.0);
    REQUIRE(projective_distance(x, y) == Approx(std::log(3.0)));
    REQUIRE(projective_distance(x, 3.7 * x) == Approx(0.0).margin(1e-14));
    Eigen::VectorXd z(2);
    z << 1.0, 0.0;
    REQUIRE_THROWS_AS(projective_distance(x, z), NonPositiveEntry);
}

TEST_CASE("certified Perron data") {
    SECTION("all-ones matrix is exact after one step") {
        for (int dim : {2, 5, 9}) {
            auto pd = perron(dense_to_sparse(Eigen::MatrixXd::Ones(dim, dim)), 1);
            REQUIRE(pd.rho == Approx(static_cast<double>(dim)));
            REQUIRE(pd.tau == Approx(0.0));
            for (Eigen::Index i = 0; i < dim; ++i)
                REQUIRE(pd.v[i] == Approx(1.0 / dim));
        }
    }

    SECTION("1x1 matrices return immediately") {
        Eigen::MatrixXd m(1, 1);
        m << 2.5;
        auto pd = perron(dense_to_sparse(m), 1);
        REQUIRE(pd.rho == 2.5);
        REQUIRE(pd.tau == 0.0);
        REQUIRE(pd.err == 0.0);
    }

    SECTION("golden matrix against the quadratic-root oracle") {
        Eigen::MatrixXd m(2, 2);
        m << 1, 1, 1, 0;
        auto pd = perron(dense_to_sparse(m), 2, {1e-12});
        REQUIRE(std::abs(pd.rho - kGolden) < 1e-10);
        REQUIRE(pd.v[0] / pd.v[1] == Approx(kGolden).epsilon(1e-9));
        REQUIRE(pd.w[0] / pd.w[1] == Approx(kGolden).epsilon(1e-9));
        REQUIRE(pd.w.dot(pd.v) == Approx(1.0));
    }

    SECTION("random primitive 20x20 against a dense eigensolver") {
        std::mt19937 rng(11);
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::MatrixXd m = random_positive(rng, 20);
            auto pd = perron(dense_to_sparse(m), 1, {1e-12});
            REQUIRE(std::abs(pd.rho - oracle::dense_spectral_radius(m)) < 1e-10);
        }
    }

    SECTION("eigen-residual invariants") {
        std::mt19937 rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            const int dim = 2 + static_cast<int>(rng() % 7);
            Eigen::MatrixXd m = random_positive(rng, dim);
            SparseMat s = dense_to_sparse(m);
            auto pd = perron(s, 1, {1e-11});
            REQUIRE((m * pd.v - pd.rho * pd.v).cwiseAbs().maxCoeff() <= pd.err * pd.rho);
            REQUIRE((m.transpose() * pd.w - pd.rho * pd.w).cwiseAbs().maxCoeff() <=
                    pd.err * pd.rho * std::max(1.0, pd.w.maxCoeff()));
            REQUIRE(pd.w.dot(pd.v) == Approx(1.0).margin(pd.err));
        }
    }

    SECTION("scale covariance") {
        std::mt19937 rng(17);
        Eigen::MatrixXd m = random_positive(rng, 6);
        auto pd = perron(dense_to_sparse(m), 1, {1e-12});
        auto pd_scaled = perron(dense_to_sparse(3.5 * m), 1, {1e-12});
        REQUIRE(pd_scaled.rho == Approx(3.5 * pd.rho));
        for (Eigen::Index i = 0; i < 6; ++i)
            REQUIRE(pd_scaled.v[i] == Approx(pd.v[i]).margin(1e-10));
    }

    SECTION("permutation covariance") {
        std::mt19937 rng(19);
        Eigen::MatrixXd m = random_positive(rng, 5);
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(5);
        perm.setIdentity();
        std::shuffle(perm.indices().data(), perm.indices().data() + 5, rng);
        Eigen::MatrixXd pm = perm.transpose() * m * perm;
        auto pd = perron(dense_to_sparse(m), 1, {1e-12});
        auto pd_p = perron(dense_to_sparse(pm), 1, {1e-12});
        REQUIRE(pd_p.rho == Approx(pd.rho));
        Eigen::VectorXd vp = perm.transpose() * pd.v;
        for (Eigen::Index i = 0; i < 5; ++i) REQUIRE(pd_p.v[i] == Approx(vp[i]).margin(1e-10));
    }

    SECTION("a matrix with no positive power is rejected") {
        Eigen::MatrixXd m(2, 2);
        m << 0, 1, 1, 0;
        REQUIRE_THROWS_AS(perron(dense_to_sparse(m), 2), NotPrimitive);
    }

    SECTION("a pessimistic tau bound near 1 exhausts the budget") {
        Eigen::MatrixXd m(2, 2);
        m << 1, 1, 1, 0;
        PerronOptions opts;
        opts.max_matvecs = 4;
        opts.tol = 1e-14;
        opts.tau_bound = 1.0 - 1e-13;
        REQUIRE_THROWS_AS(perron(dense_to_sparse(m), 2, opts), NoConvergence);
    }
}

TEST_CASE("contraction property of the projective action") {
    // d(Fx, Fy) <= tau(M) d(x, y) whenever M > 0; random trials
    std::mt19937 rng(23);
    for (int trial = 0; trial < 1000; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 7);
        Eigen::MatrixXd m = random_positive(rng, dim);
        const double tau = gamma_tau(m).tau;
        Eigen::VectorXd x = random_positive_vector(rng, dim);
        Eigen::VectorXd y = random_positive_vector(rng, dim);
        Eigen::VectorXd fx = m * x, fy = m * y;
        REQUIRE(projective_distance(fx, fy) <= tau * projective_distance(x, y) + 1e-12);
    }
}

TEST_CASE("matrix power estimates") {
    SECTION("all-ones with uniform start is exact") {
        SparseMat m = dense_to_sparse(Eigen::MatrixXd::Ones(4, 4));
        auto pd = perron(m, 1, {1e-13});
        Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 0.25);
        auto est = power_estimate(m, pd, x, 6);
        REQUIRE(est.log_radius < 1e-9);
        for (Eigen::Index i = 0; i < 4; ++i)
            REQUIRE(est.value[i] == Approx(std::pow(4.0, 6.0) * 0.25).epsilon(1e-9));
    }

    SECTION("golden matrix against exact Fibonacci powers") {
        Eigen::MatrixXd m(2, 2);
        m << 1, 1, 1, 0;
        SparseMat s = dense_to_sparse(m);
        auto pd = perron(s, 2, {1e-13});
        Eigen::VectorXd x(2);
        x << 1.0, 1.0;
        // F = 1,1,2,3,...; M^k (1,1)^T = (F_{k+2}, F_{k+1})
        std::vector<double> fib{1, 1};
        for (int i = 2; i < 16; ++i) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
        const long k = 10;
        auto est = power_estimate(s, pd, x, k);
        const double hi0 = est.value[0] * std::exp(est.log_radius);
        const double lo0 = est.value[0] * std::exp(-est.log_radius);
        REQUIRE(lo0 <= fib[11]);  // F_12 = 144
        REQUIRE(hi0 >= fib[11]);
        REQUIRE(est.value[1] * std::exp(-est.log_radius) <= fib[10]);
        REQUIRE(est.value[1] * std::exp(est.log_radius) >= fib[10]);
        REQUIRE(est.value[0] == Approx(fib[11]).epsilon(1e-2));
    }

    SECTION("zero entries in x are rejected") {
        SparseMat m = dense_to_sparse(Eigen::MatrixXd::Ones(2, 2));
        auto pd = perron(m, 1);
        Eigen::VectorXd x(2);
        x << 1.0, 0.0;
        REQUIRE_THROWS_AS(power_estimate(m, pd, x, 10), NonPositiveEntry);
    }

    SECTION("brackets contain exact powers on random primitive instances") {
        std::mt19937 rng(29);
        for (int trial = 0; trial < 50; ++trial) {
            const int dim = 8;
            Eigen::MatrixXd m = random_positive(rng, dim, 0.2, 4.0);
            SparseMat s = dense_to_sparse(m);
            auto pd = perron(s, 1, {1e-12});
            for (long k : {4L, 8L, 16L}) {
                Eigen::VectorXd x = random_positive_vector(rng, dim);
                auto est = power_estimate(s, pd, x, k);
                Eigen::VectorXd exact = x;
                for (long i = 0; i < k; ++i) exact = m * exact;
                for (Eigen::Index i = 0; i < dim; ++i) {
                    REQUIRE(exact[i] <= est.value[i] * std::exp(est.log_radius) * (1 + 1e-12));
                    REQUIRE(exact[i] >= est.value[i] * std::exp(-est.log_radius) * (1 - 1e-12));
                }
            }
        }
    }
}
