#include "dps/simd/dispatch.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace dps::simd {

namespace {

// -1: auto, otherwise the forced Isa value
std::atomic<int> g_forced{-1};

bool cpu_has_avx2() noexcept
{
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

} // namespace

std::string_view to_string(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return "scalar";
    case Isa::avx2:
        return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) noexcept
{
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#ifdef DPS_HAVE_AVX2_KERNEL
        return cpu_has_avx2();
#else
        return false;
#endif
    }
    return false;
}

Isa active_isa() noexcept
{
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) {
        const auto isa = static_cast<Isa>(forced);
        return isa_available(isa) ? isa : Isa::scalar;
    }
    if (const char* env = std::getenv("DPS_SIMD")) {
        if (std::string_view(env) == "scalar") {
            return Isa::scalar;
        }
    }
    return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

void force_isa(std::optional<Isa> isa) noexcept
{
    g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

} // namespace dps::simd
