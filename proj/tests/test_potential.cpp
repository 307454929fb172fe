#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "sofic/potential.hpp"

using namespace sofic;
using Catch::Approx;

namespace {

// phi(x) = sum_k 2^{-k} x_k on {0,1}, stored as a range-3 core of cylinder
// maxima (the tail of an all-ones extension contributes 2^{-(r-1)}).
Potential dyadic_potential() {
    auto alphabet = fixtures::binary();
    std::vector<double> table;
    for (int b0 = 0; b0 < 2; ++b0)
        for (int b1 = 0; b1 < 2; ++b1)
            for (int b2 = 0; b2 < 2; ++b2)
                table.push_back(b0 + b1 / 2.0 + b2 / 4.0 + 0.25);
    return Potential(alphabet, 3, std::move(table), Variation::exponential(1.0, 0.5));
}

std::vector<Word> all_binary(std::size_t len) { return oracle::words_avoiding({}, 2, len); }

}  // namespace

TEST_CASE("finite-range projections") {
    SECTION("zero potential projects to zero") {
        auto phi = fixtures::zero_potential();
        REQUIRE(phi.finite_range(0, Word::of({0})) == 0.0);
        REQUIRE(phi.finite_range(3, Word::of({1, 0, 1, 0})) == 0.0);
    }

    SECTION("range-1 potential is exact at depth 0") {
        auto phi = fixtures::bernoulli_13_23();
        REQUIRE(phi.finite_range(0, Word::of({0})) == Approx(std::log(1.0 / 3.0)));
        REQUIRE(phi.finite_range(0, Word::of({1})) == Approx(std::log(2.0 / 3.0)));
    }

    SECTION("dyadic potential: shallow projections maximize the tail") {
        auto phi = dyadic_potential();
        // oracle: 0 + 1/2 + geometric tail 1/2
        REQUIRE(phi.finite_range(1, Word::of({0, 1})) == Approx(1.0));
        REQUIRE(phi.finite_range(0, Word::of({1})) == Approx(2.0));
        REQUIRE(phi.finite_range(2, Word::of({0, 1, 1})) == Approx(1.0));
        REQUIRE(phi.finite_range(3, Word::of({0, 1, 1, 0})) == Approx(1.0));
    }

    SECTION("symbols outside the alphabet are rejected") {
        auto phi = fixtures::zero_potential();
        REQUIRE_THROWS_AS(phi.finite_range(0, Word::of({7})), WordNotAdmissible);
    }
}

TEST_CASE("Birkhoff sums") {
    SECTION("constant potential sums to (k+1)c") {
        auto alphabet = fixtures::binary();
        Potential phi(alphabet, 1, {0.7, 0.7}, Variation::exponential(0.0, 0.0));
        REQUIRE(phi.birkhoff_periodic(Word::of({0, 1}), 4) == Approx(5 * 0.7));
    }

    SECTION("log-Bernoulli along (01)^inf") {
        auto phi = fixtures::bernoulli_13_23();
        const double expect = 2 * std::log(1.0 / 3.0) + 2 * std::log(2.0 / 3.0);
        REQUIRE(phi.birkhoff_periodic(Word::of({0, 1}), 3) == Approx(expect));
    }

    SECTION("k = 0 is a single evaluation") {
        auto phi = dyadic_potential();
        REQUIRE(phi.birkhoff_periodic(Word::of({1, 0, 0}), 0) ==
                Approx(phi.core(Word::of({1, 0, 0}))));
    }

    SECTION("finite words need k + range letters of context") {
        auto phi = dyadic_potential();
        REQUIRE_THROWS_AS(phi.birkhoff_word(Word::of({0, 1}), 1), InsufficientContext);
        REQUIRE(phi.birkhoff_word(Word::of({0, 1, 1, 0}), 1) ==
                Approx(phi.core(Word::of({0, 1, 1})) + phi.core(Word::of({1, 1, 0}))));
    }

    SECTION("additivity under concatenated shifts on periodic points") {
        auto phi = dyadic_potential();
        const Word w = Word::of({0, 1, 1, 0, 1});
        for (int j = 0; j <= 3; ++j)
            for (int k = 0; k <= 3; ++k) {
                const Word rotated = w.cyclic_window(static_cast<std::size_t>(j + 1), w.size());
                REQUIRE(phi.birkhoff_periodic(w, j + k + 1) ==
                        Approx(phi.birkhoff_periodic(w, j) + phi.birkhoff_periodic(rotated, k))
                            .margin(1e-12));
            }
    }
}

TEST_CASE("derived constants") {
    SECTION("zero potential") {
        auto phi = fixtures::zero_potential();
        auto c = derived_constants(phi);
        REQUIRE(c.sup_norm == 0.0);
        REQUIRE(c.lambda == 0.0);
    }

    SECTION("geometric envelope sums in closed form") {
        auto v = Variation::exponential(1.0, 0.5);
        REQUIRE(v.total() == Approx(2.0));
        REQUIRE(v.tail(3) == Approx(0.25));  // sum_{j>=3} (1/2)^j
        REQUIRE(v.var(0) == 1.0);
    }

    SECTION("polynomial envelope: Lambda = C zeta(alpha) with certified remainder") {
        auto v = Variation::polynomial(1.0, 5.0);
        const double zeta5 = 1.0369277551433699;
        REQUIRE(v.total() == Approx(zeta5).epsilon(1e-9));
        REQUIRE(v.total() >= zeta5 - 1e-12);  // upper bound up to rounding
        REQUIRE(v.var(0) == 1.0);
        REQUIRE(v.var(1) == Approx(std::pow(2.0, -5.0)));
        // tail bound dominates the true tail sum_{j>=m} (j+1)^{-5}
        double true_tail = 0.0;
        for (long j = 200000; j >= 10; --j) true_tail += std::pow(j + 1.0, -5.0);
        REQUIRE(v.tail(10) >= true_tail);
        REQUIRE(v.tail(10) <= true_tail * 1.5);
    }

    SECTION("validation") {
        REQUIRE_THROWS_AS(Variation::exponential(1.0, 1.0), ValidationError);
        REQUIRE_THROWS_AS(Variation::exponential(-1.0, 0.5), ValidationError);
        REQUIRE_THROWS_AS(Variation::polynomial(1.0, 4.0), ValidationError);
    }
}

TEST_CASE("projection properties") {
    auto phi = dyadic_potential();

    SECTION("one-step refinement stays within the declared variation") {
        for (int n = 0; n < 2; ++n)
            for (const auto& a : all_binary(static_cast<std::size_t>(n) + 1))
                for (int b = 0; b < 2; ++b) {
                    const double upper = phi.finite_range(n, a);
                    const double refined =
                        phi.finite_range(n + 1, a.appended(static_cast<Sym>(b)));
                    REQUIRE(refined <= upper + 1e-15);
                    REQUIRE(upper - refined <= phi.var(n + 1) + 1e-15);
                }
    }

    SECTION("max-consistency against every core-evaluable point") {
        for (int n = 0; n < 3; ++n)
            for (const auto& a : all_binary(static_cast<std::size_t>(n) + 1)) {
                const double proj = phi.finite_range(n, a);
                for (const auto& x : all_binary(3)) {
                    if (!a.is_prefix_of(x)) continue;
                    REQUIRE(proj >= phi.core(x) - 1e-15);
                }
            }
    }
}
