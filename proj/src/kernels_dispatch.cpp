#include "dipg/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace dipg::kern {
namespace {

const Kernels* pick() {
    const char* env = std::getenv("DIPG_KERNELS");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return &scalar();
#if defined(DIPG_BUILD_AVX2)
        if (std::strcmp(env, "avx2") == 0) return &avx2();
#endif
#if defined(DIPG_BUILD_NEON)
        if (std::strcmp(env, "neon") == 0) return &neon();
#endif
        // Unknown or unsupported name: fall through to auto-detection.
    }
#if defined(DIPG_BUILD_AVX2)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
        return &avx2();
#endif
#if defined(DIPG_BUILD_NEON)
    return &neon();
#endif
    return &scalar();
}

}  // namespace

const Kernels& active() {
    static const Kernels* chosen = pick();
    return *chosen;
}

}  // namespace dipg::kern
