#include <doctest.h>

#include <cmath>
#include <random>

#include "kmsgraph/simd/kernels.hpp"

using namespace kms::simd;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

}  // namespace

TEST_CASE("scalar backend is always available and listed first") {
    const auto all = available_kernels();
    REQUIRE_FALSE(all.empty());
    CHECK(all.front()->backend == Backend::Scalar);
    CHECK(backend_name(Backend::Scalar) == "scalar");
}

TEST_CASE("every backend matches the scalar reference") {
    const KernelTable& ref = scalar_kernels();
    std::mt19937_64 rng(2024);
    for (const KernelTable* k : available_kernels()) {
        CAPTURE(k->name);
        // lengths straddling every vector width and remainder
        for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 101u}) {
            CAPTURE(n);
            const auto x = random_vec(rng, n, -3, 3), y0 = random_vec(rng, n, -3, 3);
            CHECK(rel(k->sum(x.data(), n), ref.sum(x.data(), n)) <= 1e-13);

            auto a = x, b = x;
            k->scale(a.data(), 0.37, n);
            ref.scale(b.data(), 0.37, n);
            CHECK(k->max_abs_diff(a.data(), b.data(), n) == 0.0);

            auto ya = y0, yb = y0;
            k->axpby(x.data(), 2.5, ya.data(), n);
            ref.axpby(x.data(), 2.5, yb.data(), n);
            CHECK(ref.max_abs_diff(ya.data(), yb.data(), n) <= 1e-14);

            CHECK(k->max_abs_diff(x.data(), y0.data(), n) == ref.max_abs_diff(x.data(), y0.data(), n));

            if (n > 0) {
                const auto num = random_vec(rng, n, 0.1, 5), den = random_vec(rng, n, 0.1, 5);
                double lo1, hi1, lo2, hi2;
                k->ratio_bounds(num.data(), den.data(), n, &lo1, &hi1);
                ref.ratio_bounds(num.data(), den.data(), n, &lo2, &hi2);
                CHECK(lo1 == lo2);
                CHECK(hi1 == hi2);
            }
            for (std::size_t rows : {1u, 3u, 6u}) {
                const auto m = random_vec(rng, rows * n, 0, 4);
                std::vector<double> out1(rows), out2(rows);
                k->matvec(m.data(), x.data(), out1.data(), rows, n);
                ref.matvec(m.data(), x.data(), out2.data(), rows, n);
                for (std::size_t i = 0; i < rows; ++i) CHECK(rel(out1[i], out2[i]) <= 1e-13);
            }
        }
    }
}

TEST_CASE("backend selection") {
    const Backend before = active_kernels().backend;
    CHECK(select_backend(Backend::Scalar));
    CHECK(active_kernels().backend == Backend::Scalar);
    for (const KernelTable* k : available_kernels()) CHECK(select_backend(k->backend));
    CHECK(select_backend(before));
}
