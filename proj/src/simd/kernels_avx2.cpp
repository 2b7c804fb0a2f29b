// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "kmsgraph/simd/kernels.hpp"

namespace kms::simd {

namespace {

double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void matvec(const double* m, const double* x, double* y, std::size_t rows, std::size_t cols) {
    const std::size_t body = cols & ~std::size_t{3};
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = m + i * cols;
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t j = 0; j < body; j += 4)
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc);
        double tail = 0.0;
        for (std::size_t j = body; j < cols; ++j) tail += row[j] * x[j];
        y[i] = hsum(acc) + tail;
    }
}

double sum(const double* x, std::size_t n) {
    const std::size_t body = n & ~std::size_t{3};
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < body; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double tail = 0.0;
    for (std::size_t i = body; i < n; ++i) tail += x[i];
    return hsum(acc) + tail;
}

void scale(double* x, double factor, std::size_t n) {
    const std::size_t body = n & ~std::size_t{3};
    const __m256d f = _mm256_set1_pd(factor);
    for (std::size_t i = 0; i < body; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), f));
    for (std::size_t i = body; i < n; ++i) x[i] *= factor;
}

void axpby(const double* x, double shift, double* y, std::size_t n) {
    const std::size_t body = n & ~std::size_t{3};
    const __m256d s = _mm256_set1_pd(shift);
    for (std::size_t i = 0; i < body; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(s, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    for (std::size_t i = body; i < n; ++i) y[i] = x[i] + shift * y[i];
}

void ratio_bounds(const double* num, const double* den, std::size_t n, double* lo, double* hi) {
    const std::size_t body = n & ~std::size_t{3};
    __m256d mn = _mm256_set1_pd(INFINITY);
    __m256d mx = _mm256_set1_pd(-INFINITY);
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d r = _mm256_div_pd(_mm256_loadu_pd(num + i), _mm256_loadu_pd(den + i));
        mn = _mm256_min_pd(mn, r);
        mx = _mm256_max_pd(mx, r);
    }
    alignas(32) double a[4], b[4];
    _mm256_store_pd(a, mn);
    _mm256_store_pd(b, mx);
    double l = std::min(std::min(a[0], a[1]), std::min(a[2], a[3]));
    double h = std::max(std::max(b[0], b[1]), std::max(b[2], b[3]));
    for (std::size_t i = body; i < n; ++i) {
        const double r = num[i] / den[i];
        l = std::min(l, r);
        h = std::max(h, r);
    }
    *lo = l;
    *hi = h;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    const std::size_t body = n & ~std::size_t{3};
    const __m256d sign = _mm256_set1_pd(-0.0);
    __m256d mx = _mm256_setzero_pd();
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        mx = _mm256_max_pd(mx, _mm256_andnot_pd(sign, d));
    }
    alignas(32) double m[4];
    _mm256_store_pd(m, mx);
    double out = std::max(std::max(m[0], m[1]), std::max(m[2], m[3]));
    for (std::size_t i = body; i < n; ++i) out = std::max(out, std::fabs(a[i] - b[i]));
    return out;
}

constexpr KernelTable kAvx2{Backend::Avx2, "avx2", matvec, sum, scale, axpby, ratio_bounds, max_abs_diff};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kAvx2; }
}  // namespace detail

}  // namespace kms::simd
