#include "dps/simd/kernels.hpp"
#include "vmath_avx2.hpp"

namespace dps::simd::detail {

std::size_t genz_avx2(const GenzSystem& sys, const double* uniforms, std::size_t count,
                      double* values, double* scratch)
{
    const int n = sys.dim;
    const std::size_t vec_end = count - count % 4;
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d floor = _mm256_set1_pd(ref::kProbFloor);
    const __m256d ceil = _mm256_set1_pd(ref::kProbCeil);
    for (std::size_t s = 0; s < vec_end; s += 4) {
        __m256d f = one;
        __m256d run = _mm256_setzero_pd();
        for (int i = 0; i < n; ++i) {
            __m256d mean;
            if (sys.column_constant) {
                mean = run;
            } else {
                mean = _mm256_setzero_pd();
                const double* row = sys.chol.data() + static_cast<std::size_t>(i) * n;
                for (int j = 0; j < i; ++j) {
                    const __m256d y = _mm256_loadu_pd(scratch + static_cast<std::size_t>(j) * count + s);
                    mean = _mm256_add_pd(mean, _mm256_mul_pd(_mm256_set1_pd(row[j]), y));
                }
            }
            __m256d y = _mm256_setzero_pd();
            if (sys.singular[i]) {
                const __m256d lo = _mm256_set1_pd(sys.lower[i] - sys.singular_slack);
                const __m256d hi = _mm256_set1_pd(sys.upper[i] + sys.singular_slack);
                const __m256d inside = _mm256_and_pd(_mm256_cmp_pd(mean, lo, _CMP_GE_OQ),
                                                     _mm256_cmp_pd(mean, hi, _CMP_LE_OQ));
                f = _mm256_mul_pd(f, _mm256_and_pd(inside, one));
            } else {
                const __m256d inv = _mm256_set1_pd(sys.inv_diag[i]);
                const __m256d lo = _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(sys.lower[i]), mean), inv);
                const __m256d hi = _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(sys.upper[i]), mean), inv);
                const __m256d d = avx2::normal_cdf(lo);
                const __m256d e = avx2::normal_cdf(hi);
                const __m256d width = _mm256_sub_pd(e, d);
                f = _mm256_mul_pd(f, width);
                if (i + 1 < n) {
                    const __m256d w = _mm256_loadu_pd(uniforms + static_cast<std::size_t>(i) * count + s);
                    __m256d t = _mm256_add_pd(d, _mm256_mul_pd(w, width));
                    t = _mm256_max_pd(t, floor);
                    t = _mm256_min_pd(t, ceil);
                    y = avx2::normal_quantile(t);
                }
            }
            if (i + 1 < n) {
                _mm256_storeu_pd(scratch + static_cast<std::size_t>(i) * count + s, y);
                if (sys.column_constant) {
                    run = _mm256_add_pd(run, _mm256_mul_pd(_mm256_set1_pd(sys.column_value[i]), y));
                }
            }
        }
        _mm256_storeu_pd(values + s, f);
    }
    return vec_end;
}

namespace {

template <class Fn>
std::size_t apply(const double* in, double* out, std::size_t n, Fn fn)
{
    const std::size_t vec_end = n - n % 4;
    for (std::size_t i = 0; i < vec_end; i += 4) {
        _mm256_storeu_pd(out + i, fn(_mm256_loadu_pd(in + i)));
    }
    return vec_end;
}

} // namespace

std::size_t exp_avx2(const double* in, double* out, std::size_t n)
{
    return apply(in, out, n, [](__m256d x) { return avx2::exp_nonpositive(x); });
}

std::size_t log_avx2(const double* in, double* out, std::size_t n)
{
    return apply(in, out, n, [](__m256d x) { return avx2::log_positive(x); });
}

std::size_t cdf_avx2(const double* in, double* out, std::size_t n)
{
    return apply(in, out, n, [](__m256d x) { return avx2::normal_cdf(x); });
}

std::size_t quantile_avx2(const double* in, double* out, std::size_t n)
{
    return apply(in, out, n, [](__m256d x) { return avx2::normal_quantile(x); });
}

} // namespace dps::simd::detail
