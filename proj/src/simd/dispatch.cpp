#include <atomic>
#include <cstdlib>
#include <string>

#include "kmsgraph/simd/kernels.hpp"

namespace kms::simd {

namespace detail {
#if !KMSGRAPH_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !KMSGRAPH_HAVE_NEON
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if KMSGRAPH_HAVE_AVX2 && (defined(__x86_64__) || defined(__i386__)) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable* lookup(Backend backend) {
    switch (backend) {
        case Backend::Scalar: return &scalar_kernels();
        case Backend::Avx2: return cpu_has_avx2() ? detail::avx2_table() : nullptr;
        case Backend::Neon: return detail::neon_table();  // NEON is baseline on aarch64
    }
    return nullptr;
}

const KernelTable* pick_default() {
    if (const char* env = std::getenv("KMSGRAPH_SIMD")) {
        const std::string want(env);
        for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon})
            if (want == backend_name(b))
                if (const KernelTable* t = lookup(b)) return t;
    }
    for (Backend b : {Backend::Avx2, Backend::Neon})
        if (const KernelTable* t = lookup(b)) return t;
    return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() {
    static std::atomic<const KernelTable*> slot{pick_default()};
    return slot;
}

}  // namespace

std::string_view backend_name(Backend backend) {
    switch (backend) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
        case Backend::Neon: return "neon";
    }
    return "unknown";
}

std::vector<const KernelTable*> available_kernels() {
    std::vector<const KernelTable*> out;
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon})
        if (const KernelTable* t = lookup(b)) out.push_back(t);
    return out;
}

const KernelTable& active_kernels() { return *active_slot().load(std::memory_order_acquire); }

bool select_backend(Backend backend) {
    const KernelTable* t = lookup(backend);
    if (!t) return false;
    active_slot().store(t, std::memory_order_release);
    return true;
}

}  // namespace kms::simd
