#pragma once

// AVX2 mirrors of dps/simd/vmath.hpp. Every function performs the same IEEE
// operations in the same order as its scalar reference; branches become
// masked blends. No FMA: the reference rounds after every multiply.

#include "dps/simd/vmath.hpp"

#include <immintrin.h>

namespace dps::simd::avx2 {

template <std::size_t N>
inline __m256d horner(const double (&c)[N], __m256d x) noexcept
{
    __m256d acc = _mm256_set1_pd(c[0]);
    for (std::size_t i = 1; i < N; ++i) {
        acc = _mm256_add_pd(_mm256_mul_pd(acc, x), _mm256_set1_pd(c[i]));
    }
    return acc;
}

inline __m256d abs(__m256d x) noexcept
{
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

inline __m256d negate(__m256d x) noexcept
{
    return _mm256_xor_pd(x, _mm256_set1_pd(-0.0));
}

inline __m256d exp_nonpositive(__m256d x) noexcept
{
    const __m256d k = _mm256_round_pd(
        _mm256_add_pd(_mm256_mul_pd(x, _mm256_set1_pd(ref::kLog2e)), _mm256_set1_pd(0.5)),
        _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
    const __m256d r = _mm256_sub_pd(_mm256_sub_pd(x, _mm256_mul_pd(k, _mm256_set1_pd(ref::kLn2Hi))),
                                    _mm256_mul_pd(k, _mm256_set1_pd(ref::kLn2Lo)));
    const __m256d p = horner(ref::kExpPoly, r);
    __m256i ki = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(k));
    ki = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(ki));
}

inline __m256d log_positive(__m256d x) noexcept
{
    const __m256i bits = _mm256_castpd_si256(x);
    // exponent field as a double: OR it under 2^52 and subtract 2^52
    const __m256i field = _mm256_srli_epi64(bits, 52);
    const __m256d magic = _mm256_set1_pd(4503599627370496.0);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(field, _mm256_castpd_si256(magic))), magic);
    e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));
    __m256d m = _mm256_castsi256_pd(
        _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                        _mm256_set1_epi64x(0x3FF0000000000000ll)));
    const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(ref::kSqrt2), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    e = _mm256_blendv_pd(e, _mm256_add_pd(e, _mm256_set1_pd(1.0)), big);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d s = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d z = _mm256_mul_pd(s, s);
    const __m256d logm = _mm256_mul_pd(s, horner(ref::kLogPoly, z));
    return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(ref::kLn2Hi)),
                         _mm256_add_pd(logm, _mm256_mul_pd(e, _mm256_set1_pd(ref::kLn2Lo))));
}

inline __m256d normal_cdf(__m256d x) noexcept
{
    namespace c = coef;
    const __m256d xa_raw = abs(x);
    const __m256d limit = _mm256_set1_pd(c::kCdfLimit);
    const __m256d beyond = _mm256_cmp_pd(xa_raw, limit, _CMP_GT_OQ);
    const __m256d xa = _mm256_min_pd(xa_raw, limit);
    const __m256d ex = exp_nonpositive(_mm256_mul_pd(_mm256_mul_pd(xa, xa), _mm256_set1_pd(-0.5)));

    const __m256d is_near = _mm256_cmp_pd(xa, _mm256_set1_pd(c::kCdfCut), _CMP_LT_OQ);
    const int near_lanes = _mm256_movemask_pd(is_near);
    // each branch is evaluated only if some lane takes it; the blend result
    // is the same either way
    __m256d near_tail = _mm256_setzero_pd();
    if (near_lanes != 0) {
        near_tail = _mm256_div_pd(_mm256_mul_pd(ex, horner(c::kCdfNum, xa)), horner(c::kCdfDen, xa));
    }
    __m256d far_tail = _mm256_setzero_pd();
    if (near_lanes != 0xF) {
        __m256d b = _mm256_add_pd(xa, _mm256_set1_pd(c::kCdfFractionSeed));
        for (int k = c::kCdfFractionTerms; k >= 1; --k) {
            b = _mm256_add_pd(xa, _mm256_div_pd(_mm256_set1_pd(static_cast<double>(k)), b));
        }
        far_tail = _mm256_div_pd(_mm256_div_pd(ex, b), _mm256_set1_pd(c::kSqrtTwoPi));
    }
    __m256d tail = _mm256_blendv_pd(far_tail, near_tail, is_near);
    tail = _mm256_blendv_pd(tail, _mm256_setzero_pd(), beyond);
    const __m256d positive = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_GT_OQ);
    return _mm256_blendv_pd(tail, _mm256_sub_pd(_mm256_set1_pd(1.0), tail), positive);
}

inline __m256d normal_quantile(__m256d p) noexcept
{
    namespace c = coef;
    const __m256d q = _mm256_sub_pd(p, _mm256_set1_pd(0.5));
    const __m256d central_mask = _mm256_cmp_pd(abs(q), _mm256_set1_pd(c::kCentralSplit), _CMP_LE_OQ);
    const __m256d rc = _mm256_sub_pd(_mm256_set1_pd(c::kCentralShift), _mm256_mul_pd(q, q));
    const __m256d central =
        _mm256_div_pd(_mm256_mul_pd(q, horner(c::kCentralNum, rc)), horner(c::kCentralDen, rc));

    const __m256d negative = _mm256_cmp_pd(q, _mm256_setzero_pd(), _CMP_LT_OQ);
    __m256d pp = _mm256_blendv_pd(_mm256_sub_pd(_mm256_set1_pd(1.0), p), p, negative);
    // keep central lanes away from log's domain edges; their result is discarded
    pp = _mm256_blendv_pd(pp, _mm256_set1_pd(0.25), central_mask);
    const __m256d r = _mm256_sqrt_pd(negate(log_positive(pp)));

    const __m256d rn = _mm256_sub_pd(r, _mm256_set1_pd(c::kNearShift));
    const __m256d near_val = _mm256_div_pd(horner(c::kNearNum, rn), horner(c::kNearDen, rn));
    const __m256d rf = _mm256_sub_pd(r, _mm256_set1_pd(c::kFarShift));
    const __m256d far_val = _mm256_div_pd(horner(c::kFarNum, rf), horner(c::kFarDen, rf));
    const __m256d is_near = _mm256_cmp_pd(r, _mm256_set1_pd(c::kTailSplit), _CMP_LE_OQ);
    __m256d val = _mm256_blendv_pd(far_val, near_val, is_near);
    val = _mm256_blendv_pd(val, negate(val), negative);
    return _mm256_blendv_pd(val, central, central_mask);
}

} // namespace dps::simd::avx2
