#include <algorithm>
#include <cmath>

#include "kmsgraph/simd/kernels.hpp"

namespace kms::simd {

namespace {

void matvec(const double* m, const double* x, double* y, std::size_t rows, std::size_t cols) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = m + i * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
}

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void scale(double* x, double factor, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= factor;
}

void axpby(const double* x, double shift, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + shift * y[i];
}

void ratio_bounds(const double* num, const double* den, std::size_t n, double* lo, double* hi) {
    double mn = INFINITY, mx = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = num[i] / den[i];
        mn = std::min(mn, r);
        mx = std::max(mx, r);
    }
    *lo = mn;
    *hi = mx;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, std::fabs(a[i] - b[i]));
    return mx;
}

constexpr KernelTable kScalar{Backend::Scalar, "scalar", matvec, sum, scale, axpby, ratio_bounds, max_abs_diff};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace kms::simd
