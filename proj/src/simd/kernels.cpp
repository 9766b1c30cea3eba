#include "dps/simd/kernels.hpp"
#include "dps/simd/vmath.hpp"

#include <stdexcept>

namespace dps::simd {

namespace {

void check_sizes(std::span<const double> in, std::span<double> out)
{
    if (out.size() < in.size()) {
        throw std::invalid_argument("output span shorter than input");
    }
}

template <class Scalar>
void finish_scalar(std::span<const double> in, std::span<double> out, std::size_t from, Scalar fn)
{
    for (std::size_t i = from; i < in.size(); ++i) {
        out[i] = fn(in[i]);
    }
}

} // namespace

void genz_evaluate(const GenzSystem& sys, std::span<const double> uniforms, std::size_t count,
                   std::span<double> values, std::span<double> scratch, Isa isa)
{
    const std::size_t n = static_cast<std::size_t>(sys.dim);
    if (sys.dim < 1 || sys.chol.size() != n * n || sys.lower.size() != n || sys.upper.size() != n ||
        sys.inv_diag.size() != n || sys.singular.size() != n ||
        (sys.column_constant && sys.column_value.size() < n)) {
        throw std::invalid_argument("malformed GenzSystem");
    }
    if (values.size() < count || scratch.size() < n * count || uniforms.size() < (n - 1) * count) {
        throw std::invalid_argument("buffer too small for genz_evaluate");
    }
    std::size_t done = 0;
#ifdef DPS_HAVE_AVX2_KERNEL
    if (isa == Isa::avx2 && isa_available(Isa::avx2)) {
        done = detail::genz_avx2(sys, uniforms.data(), count, values.data(), scratch.data());
    }
#else
    (void)isa;
#endif
    detail::genz_scalar(sys, uniforms.data(), count, done, values.data(), scratch.data());
}

#ifdef DPS_HAVE_AVX2_KERNEL
#define DPS_BATCH(name, avx_fn, ref_fn)                                                    \
    void name(std::span<const double> in, std::span<double> out, Isa isa)                \
    {                                                                                    \
        check_sizes(in, out);                                                            \
        std::size_t done = 0;                                                            \
        if (isa == Isa::avx2 && isa_available(Isa::avx2)) {                              \
            done = detail::avx_fn(in.data(), out.data(), in.size());                     \
        }                                                                                \
        finish_scalar(in, out, done, [](double x) { return ref::ref_fn(x); });          \
    }
#else
#define DPS_BATCH(name, avx_fn, ref_fn)                                                    \
    void name(std::span<const double> in, std::span<double> out, Isa)                    \
    {                                                                                    \
        check_sizes(in, out);                                                            \
        finish_scalar(in, out, 0, [](double x) { return ref::ref_fn(x); });             \
    }
#endif

DPS_BATCH(exp_nonpositive, exp_avx2, exp_nonpositive)
DPS_BATCH(log_positive, log_avx2, log_positive)
DPS_BATCH(normal_cdf, cdf_avx2, normal_cdf)
DPS_BATCH(normal_quantile, quantile_avx2, normal_quantile)

#undef DPS_BATCH

} // namespace dps::simd
