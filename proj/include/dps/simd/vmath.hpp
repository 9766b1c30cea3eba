#pragma once

// Scalar reference versions of the elementary functions used by the MVN
// integrand. The AVX2 kernels perform exactly the same sequence of IEEE
// operations, so both paths produce bit-identical results; keep them in sync.
//
// Accuracy (checked in tests against libm): exp and log within a few ulp,
// normal_cdf within 1e-15 absolute, normal_quantile within 1e-15 relative
// away from the extreme tails.

#include "dps/simd/normal_coefficients.hpp"

#include <bit>
#include <cmath>
#include <cstdint>

namespace dps::simd::ref {

inline constexpr double kLog2e = 1.4426950408889634074;
inline constexpr double kLn2Hi = 6.93147180369123816490e-01; // low 21 bits clear
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309504880;

// 1/k! for k = 12..0
inline constexpr double kExpPoly[13] = {
    1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0, 1.0 / 40320.0,
    1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,     1.0 / 6.0,
    1.0 / 2.0,         1.0,              1.0};

// 2/(2k+1) for k = 10..0: log(m) = s * P(s^2), s = (m-1)/(m+1)
inline constexpr double kLogPoly[11] = {
    2.0 / 21.0, 2.0 / 19.0, 2.0 / 17.0, 2.0 / 15.0, 2.0 / 13.0, 2.0 / 11.0,
    2.0 / 9.0,  2.0 / 7.0,  2.0 / 5.0,  2.0 / 3.0,  2.0};

// Clamp range for probabilities fed to the quantile inside the kernel.
inline constexpr double kProbFloor = 2.2250738585072014e-308;  // DBL_MIN
inline constexpr double kProbCeil = 0.99999999999999988898;    // 1 - 2^-53

template <std::size_t N>
inline double horner(const double (&c)[N], double x) noexcept
{
    double acc = c[0];
    for (std::size_t i = 1; i < N; ++i) {
        acc = acc * x + c[i];
    }
    return acc;
}

/// e^x for x in [-708, 0].
inline double exp_nonpositive(double x) noexcept
{
    const double k = std::floor(x * kLog2e + 0.5);
    const double r = (x - k * kLn2Hi) - k * kLn2Lo;
    const double p = horner(kExpPoly, r);
    const auto bits = static_cast<std::uint64_t>(static_cast<std::int64_t>(k) + 1023) << 52;
    return p * std::bit_cast<double>(bits);
}

/// Natural log for positive normal x.
inline double log_positive(double x) noexcept
{
    const auto bits = std::bit_cast<std::uint64_t>(x);
    double e = static_cast<double>(static_cast<std::int64_t>(bits >> 52)) - 1023.0;
    double m = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
    if (m > kSqrt2) {
        m = m * 0.5;
        e = e + 1.0;
    }
    const double s = (m - 1.0) / (m + 1.0);
    const double z = s * s;
    const double logm = s * horner(kLogPoly, z);
    return e * kLn2Hi + (logm + e * kLn2Lo);
}

inline double normal_cdf(double x) noexcept
{
    namespace c = coef;
    const double xa = std::fabs(x);
    double tail = 0.0;
    if (!(xa > c::kCdfLimit)) {
        const double ex = exp_nonpositive((xa * xa) * -0.5);
        if (xa < c::kCdfCut) {
            tail = (ex * horner(c::kCdfNum, xa)) / horner(c::kCdfDen, xa);
        } else {
            // Mills-ratio continued fraction
            double b = xa + c::kCdfFractionSeed;
            for (int k = c::kCdfFractionTerms; k >= 1; --k) {
                b = xa + static_cast<double>(k) / b;
            }
            tail = (ex / b) / c::kSqrtTwoPi;
        }
    }
    return x > 0.0 ? 1.0 - tail : tail;
}

/// Phi^-1(p) for p in [kProbFloor, kProbCeil].
inline double normal_quantile(double p) noexcept
{
    namespace c = coef;
    const double q = p - 0.5;
    if (std::fabs(q) <= c::kCentralSplit) {
        const double r = c::kCentralShift - q * q;
        return (q * horner(c::kCentralNum, r)) / horner(c::kCentralDen, r);
    }
    const double pp = q < 0.0 ? p : 1.0 - p;
    double r = std::sqrt(-log_positive(pp));
    double val;
    if (r <= c::kTailSplit) {
        r = r - c::kNearShift;
        val = horner(c::kNearNum, r) / horner(c::kNearDen, r);
    } else {
        r = r - c::kFarShift;
        val = horner(c::kFarNum, r) / horner(c::kFarDen, r);
    }
    return q < 0.0 ? -val : val;
}

} // namespace dps::simd::ref
