#include <doctest.h>

#include <random>

#include "kmsgraph/lattice.hpp"

using namespace kms;

TEST_CASE("lattice basics") {
    const Lattice z2 = Lattice::generated_by(2, {{1, 0}, {0, 1}});
    CHECK(z2.dimension() == 2);
    CHECK(z2.contains(IntVector{-3, 7}));

    const Lattice l3 = Lattice::generated_by(1, {{6}, {9}});
    REQUIRE(l3.dimension() == 1);
    CHECK(l3.basis()[0] == IntVector{3});
    CHECK(l3.contains(IntVector{-12}));
    CHECK_FALSE(l3.contains(IntVector{4}));
    CHECK(*l3.coordinates(IntVector{15}) == IntVector{5});

    const Lattice zero = Lattice::generated_by(2, {{0, 0}});
    CHECK(zero.dimension() == 0);
    CHECK(zero.contains(IntVector{0, 0}));
    CHECK_FALSE(zero.contains(IntVector{1, 0}));

    const Lattice diag = Lattice::generated_by(2, {{2, 2}, {4, 4}});
    CHECK(diag.dimension() == 1);
    CHECK(diag.contains(IntVector{-2, -2}));
    CHECK_FALSE(diag.contains(IntVector{1, 1}));
    CHECK(diag.with(IntVector{1, 1}) == Lattice::generated_by(2, {{1, 1}}));
    CHECK(diag.with(IntVector{0, 2}) == Lattice::generated_by(2, {{2, 0}, {0, 2}}));
}

TEST_CASE("lattice HNF properties on random generators") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> coef(-6, 6);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t k = 1 + trial % 3;
        std::vector<IntVector> gens(1 + trial % 4, IntVector(k));
        for (auto& g : gens)
            for (auto& x : g) x = coef(rng);
        const Lattice l = Lattice::generated_by(k, gens);

        // echelon shape
        const auto& b = l.basis();
        for (std::size_t i = 0; i < b.size(); ++i) {
            const std::size_t p = l.pivots()[i];
            CHECK(b[i][p] > 0);
            for (std::size_t j = 0; j < p; ++j) CHECK(b[i][j] == 0);
            if (i > 0) CHECK(l.pivots()[i - 1] < p);
            for (std::size_t h = 0; h < i; ++h) {
                CHECK(b[h][p] >= 0);
                CHECK(b[h][p] < b[i][p]);
            }
        }
        // generators and their integer combinations are members with matching coordinates
        IntVector sum(k, 0);
        for (const auto& g : gens) {
            REQUIRE(l.contains(g));
            const auto c = *l.coordinates(g);
            IntVector back(k, 0);
            for (std::size_t j = 0; j < c.size(); ++j)
                for (std::size_t t = 0; t < k; ++t) back[t] += c[j] * b[j][t];
            CHECK(back == g);
            const int w = coef(rng);
            for (std::size_t t = 0; t < k; ++t) sum[t] += w * g[t];
        }
        CHECK(l.contains(sum));
        // adding a member changes nothing, and the form is canonical
        CHECK(l.with(sum) == l);
        std::vector<IntVector> shuffled = gens;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        shuffled.push_back(sum);
        CHECK(Lattice::generated_by(k, shuffled) == l);
    }
}
