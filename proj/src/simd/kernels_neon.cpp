#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "kmsgraph/simd/kernels.hpp"

namespace kms::simd {

namespace {

void matvec(const double* m, const double* x, double* y, std::size_t rows, std::size_t cols) {
    const std::size_t body = cols & ~std::size_t{1};
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = m + i * cols;
        float64x2_t acc = vdupq_n_f64(0.0);
        for (std::size_t j = 0; j < body; j += 2) acc = vfmaq_f64(acc, vld1q_f64(row + j), vld1q_f64(x + j));
        double tail = 0.0;
        for (std::size_t j = body; j < cols; ++j) tail += row[j] * x[j];
        y[i] = vaddvq_f64(acc) + tail;
    }
}

double sum(const double* x, std::size_t n) {
    const std::size_t body = n & ~std::size_t{1};
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t i = 0; i < body; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
    double tail = 0.0;
    for (std::size_t i = body; i < n; ++i) tail += x[i];
    return vaddvq_f64(acc) + tail;
}

void scale(double* x, double factor, std::size_t n) {
    const std::size_t body = n & ~std::size_t{1};
    for (std::size_t i = 0; i < body; i += 2) vst1q_f64(x + i, vmulq_n_f64(vld1q_f64(x + i), factor));
    for (std::size_t i = body; i < n; ++i) x[i] *= factor;
}

void axpby(const double* x, double shift, double* y, std::size_t n) {
    const std::size_t body = n & ~std::size_t{1};
    const float64x2_t s = vdupq_n_f64(shift);
    for (std::size_t i = 0; i < body; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(x + i), s, vld1q_f64(y + i)));
    for (std::size_t i = body; i < n; ++i) y[i] = x[i] + shift * y[i];
}

void ratio_bounds(const double* num, const double* den, std::size_t n, double* lo, double* hi) {
    double l = INFINITY, h = -INFINITY;
    const std::size_t body = n & ~std::size_t{1};
    for (std::size_t i = 0; i < body; i += 2) {
        const float64x2_t r = vdivq_f64(vld1q_f64(num + i), vld1q_f64(den + i));
        l = std::min(l, vminvq_f64(r));
        h = std::max(h, vmaxvq_f64(r));
    }
    for (std::size_t i = body; i < n; ++i) {
        const double r = num[i] / den[i];
        l = std::min(l, r);
        h = std::max(h, r);
    }
    *lo = l;
    *hi = h;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double out = 0.0;
    const std::size_t body = n & ~std::size_t{1};
    for (std::size_t i = 0; i < body; i += 2)
        out = std::max(out, vmaxvq_f64(vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
    for (std::size_t i = body; i < n; ++i) out = std::max(out, std::fabs(a[i] - b[i]));
    return out;
}

constexpr KernelTable kNeon{Backend::Neon, "neon", matvec, sum, scale, axpby, ratio_bounds, max_abs_diff};

}  // namespace

namespace detail {
const KernelTable* neon_table() { return &kNeon; }
}  // namespace detail

}  // namespace kms::simd
