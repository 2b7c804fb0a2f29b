#pragma once

// Dense double-precision kernels used by the power iterations. Each backend
// implements the same table; the scalar one is the reference and the vector
// backends are checked against it in tests/test_kernels.cpp.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace kms::simd {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
    Backend backend;
    std::string_view name;
    // y = M x for a row-major rows x cols matrix.
    void (*matvec)(const double* m, const double* x, double* y, std::size_t rows, std::size_t cols);
    double (*sum)(const double* x, std::size_t n);
    void (*scale)(double* x, double factor, std::size_t n);
    // y = x + shift * y  (in place on y)
    void (*axpby)(const double* x, double shift, double* y, std::size_t n);
    // min and max of num[i] / den[i]
    void (*ratio_bounds)(const double* num, const double* den, std::size_t n, double* lo, double* hi);
    double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_kernels();

/// Backends compiled into this binary and supported by the running CPU.
std::vector<const KernelTable*> available_kernels();

/// The table used by the library. Chosen once at startup (best available,
/// overridable with KMSGRAPH_SIMD=scalar|avx2|neon).
const KernelTable& active_kernels();

/// Force a backend; returns false if it is unavailable.
bool select_backend(Backend backend);

std::string_view backend_name(Backend backend);

namespace detail {
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();
}  // namespace detail

}  // namespace kms::simd
