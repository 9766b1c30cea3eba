#pragma once

#include <optional>
#include <string_view>

namespace dps::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

/// True if this binary carries the kernel and the CPU can run it.
bool isa_available(Isa isa) noexcept;

/// Best available ISA, unless overridden by force_isa() or the
/// DPS_SIMD environment variable ("scalar" or "avx2").
Isa active_isa() noexcept;

/// Pin dispatch to one ISA (nullopt restores auto-detection). Requests for
/// an unavailable ISA fall back to scalar.
void force_isa(std::optional<Isa> isa) noexcept;

} // namespace dps::simd
