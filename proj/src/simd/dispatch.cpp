#include <cstdlib>
#include <cstring>

#include "kernels_impl.hpp"

namespace sklab::simd {

const KernelTable& scalar_kernels() {
    static const KernelTable table{Isa::scalar, "scalar", detail::horner_scalar, detail::horner2_scalar,
                                   detail::pair_sum_scalar};
    return table;
}

const KernelTable* avx2_kernels() {
#if defined(SKLAB_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    static const KernelTable table{Isa::avx2, "avx2", detail::horner_avx2, detail::horner2_avx2,
                                   detail::pair_sum_avx2};
    return supported ? &table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_kernels() {
    static const KernelTable* chosen = [] {
        const char* env = std::getenv("SKLAB_SIMD");
        if (env && std::strcmp(env, "scalar") == 0) return &scalar_kernels();
        if (const KernelTable* t = avx2_kernels()) return t;
        return &scalar_kernels();
    }();
    return *chosen;
}

}  // namespace sklab::simd
