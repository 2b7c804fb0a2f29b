#include <doctest.h>

#include <cmath>
#include <random>

#include "kmsgraph/spectral.hpp"
#include "support/graphs.hpp"
#include "support/oracles.hpp"

using namespace kms;

namespace {

DenseMatrix dense(const std::vector<std::vector<double>>& rows) {
    DenseMatrix m(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
    return m;
}

std::vector<std::vector<double>> rows_of(const DenseMatrix& m) {
    std::vector<std::vector<double>> out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    return out;
}

// Eigen's eigenvalues of a defective nilpotent matrix are off by ~eps^(1/n);
// small integer matrices are tested for nilpotency exactly instead
bool nilpotent(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    auto p = m;
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<std::vector<double>> q(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t l = 0; l < n; ++l) q[i][j] += p[i][l] * m[l][j];
        p = q;
    }
    for (const auto& row : p)
        for (double x : row)
            if (x != 0.0) return false;
    return true;
}

}  // namespace

TEST_CASE("default F: box definition") {
    const auto flip = default_well_chosen(kms::testing::flip_square());
    std::set<Degree> got(flip.degrees.begin(), flip.degrees.end());
    CHECK(got == std::set<Degree>{Degree{0, 1}, Degree{1, 0}, Degree{1, 1}});
    const auto c3 = default_well_chosen(kms::testing::cycle(3));
    std::set<Degree> got3(c3.degrees.begin(), c3.degrees.end());
    CHECK(got3 == std::set<Degree>{Degree{1}, Degree{2}, Degree{3}});
}

TEST_CASE("A_F examples") {
    const KGraph flip = kms::testing::flip_square();
    CHECK(a_f_matrix(flip, default_well_chosen(flip))(0, 0) == 3);

    const KGraph sf = kms::testing::sink_feeding();
    const IntMatrix af = a_f_matrix(sf, default_well_chosen(sf));
    const auto v = *sf.find_vertex("v"), u = *sf.find_vertex("u");
    CHECK(af(v, v) == 6);
    CHECK(af(u, v) == 3);
    CHECK(af(u, u) == 0);

    const IntMatrix twice = a_f_matrix(sf, WellChosenSet{{Degree{1}, Degree{1}}});
    CHECK(twice == sf.vertex_matrix(0).scaled(2));
}

TEST_CASE("well-chosen certification") {
    const KGraph sf = kms::testing::sink_feeding();
    CHECK(is_well_chosen(sf, default_well_chosen(sf)));
    const KGraph c3 = kms::testing::cycle(3);
    CHECK_FALSE(is_well_chosen(c3, WellChosenSet{{Degree{1}}}));  // misses v1 Λ^2 v3
    for (const auto& cg : kms::testing::make_corpus(20, 71)) CHECK(is_well_chosen(cg.graph, default_well_chosen(cg.graph)));
}

TEST_CASE("perron examples") {
    const auto one = perron_vector(dense({{3}}));
    CHECK(one.vector == std::vector<double>{1.0});
    CHECK(one.radius == doctest::Approx(3));
    const auto two = perron_vector(dense({{1, 1}, {1, 1}}));
    CHECK(two.radius == doctest::Approx(2).epsilon(1e-12));
    CHECK(two.vector[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(two.vector[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS(perron_vector(dense({{1, 0}, {1, 1}})));
}

TEST_CASE("spectral radius: reducible and trivial") {
    CHECK(spectral_radius(dense({{0, 0}, {1, 0}})) == 0.0);
    CHECK(spectral_radius(dense({{2, 0}, {1, 0}})) == doctest::Approx(2));
    CHECK(spectral_radius(dense({{2, 0}, {5, 3}})) == doctest::Approx(3));
    const std::vector<VertexId> s{0};
    CHECK(spectral_radius(dense({{2, 0}, {5, 3}}), s) == doctest::Approx(2));
    CHECK(spectral_radius(dense({{2}}), std::vector<VertexId>{}) == 0.0);
    // period 3: plain power iteration would oscillate
    CHECK(spectral_radius(dense({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})) == doctest::Approx(1).epsilon(1e-12));
}

TEST_CASE("property: spectral radius and Perron vector agree with Eigen") {
    std::mt19937_64 rng(81);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng() % 7;
        std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
        const bool positive = t % 3 == 0;
        for (auto& row : m)
            for (auto& x : row) x = positive ? 0.1 + static_cast<double>(rng() % 100) / 10.0
                                             : (rng() % 3 == 0 ? static_cast<double>(rng() % 4) : 0.0);
        const double expect = !positive && nilpotent(m) ? 0.0 : oracle::spectral_radius(m);
        const double got = spectral_radius(dense(m));
        CHECK(got == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
        if (positive) {
            const auto pr = perron_vector(dense(m));
            const auto ref = oracle::eigenvector(m, expect);
            for (std::size_t i = 0; i < n; ++i) CHECK(pr.vector[i] == doctest::Approx(ref[i]).epsilon(1e-9));
            CHECK(pr.residual <= 1e-10 * std::max(1.0, pr.radius));
            CHECK(pr.lower <= pr.radius);
            CHECK(pr.radius <= pr.upper);
        }
    }
}

TEST_CASE("property: vertex matrices of corpus graphs") {
    for (const auto& cg : kms::testing::make_corpus(20, 91)) {
        const KGraph& g = cg.graph;
        for (std::size_t i = 0; i < g.rank(); ++i) {
            const DenseMatrix a = DenseMatrix::from(g.vertex_matrix(i));
            CHECK(spectral_radius(a) == doctest::Approx(oracle::spectral_radius(rows_of(a))).epsilon(1e-9));
        }
        // commuting vertex matrices
        if (g.rank() == 2) CHECK(g.vertex_matrix(0) * g.vertex_matrix(1) == g.vertex_matrix(1) * g.vertex_matrix(0));
    }
}

TEST_CASE("support components") {
    const auto comps = support_components(dense({{1, 0, 0}, {1, 0, 1}, {0, 1, 0}}));
    std::set<std::vector<std::size_t>> got(comps.begin(), comps.end());
    CHECK(got == std::set<std::vector<std::size_t>>{{0}, {1, 2}});
}
