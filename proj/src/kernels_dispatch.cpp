#include <atomic>

#include "rsvd/kernels.hpp"

namespace rsvd::kern {

const Ops* avx2_ops_or_null();  // defined in kernels_avx2.cpp

namespace {

std::atomic<bool> g_force_scalar{false};

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* detect() {
    if (!cpu_has_avx2_fma()) return nullptr;
    return avx2_ops_or_null();
}

}  // namespace

bool simd_available() {
    static const bool avail = detect() != nullptr;
    return avail;
}

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

const Ops& active_ops() {
    static const Ops* simd = detect();
    if (simd && !g_force_scalar.load(std::memory_order_relaxed)) return *simd;
    return scalar_ops();
}

}  // namespace rsvd::kern
