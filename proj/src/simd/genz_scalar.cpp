#include "dps/simd/kernels.hpp"
#include "dps/simd/vmath.hpp"

#include <algorithm>

namespace dps::simd::detail {

void genz_scalar(const GenzSystem& sys, const double* uniforms, std::size_t count,
                 std::size_t begin, double* values, double* scratch)
{
    const int n = sys.dim;
    const double* chol = sys.chol.data();
    for (std::size_t s = begin; s < count; ++s) {
        double f = 1.0;
        double run = 0.0;
        for (int i = 0; i < n; ++i) {
            double mean;
            if (sys.column_constant) {
                mean = run;
            } else {
                mean = 0.0;
                const double* row = chol + static_cast<std::size_t>(i) * n;
                for (int j = 0; j < i; ++j) {
                    mean = mean + row[j] * scratch[static_cast<std::size_t>(j) * count + s];
                }
            }
            double y = 0.0;
            if (sys.singular[i]) {
                const bool inside = mean >= sys.lower[i] - sys.singular_slack &&
                                    mean <= sys.upper[i] + sys.singular_slack;
                f = f * (inside ? 1.0 : 0.0);
            } else {
                const double lo = (sys.lower[i] - mean) * sys.inv_diag[i];
                const double hi = (sys.upper[i] - mean) * sys.inv_diag[i];
                const double d = ref::normal_cdf(lo);
                const double e = ref::normal_cdf(hi);
                const double width = e - d;
                f = f * width;
                if (i + 1 < n) {
                    double t = d + uniforms[static_cast<std::size_t>(i) * count + s] * width;
                    t = std::max(t, ref::kProbFloor);
                    t = std::min(t, ref::kProbCeil);
                    y = ref::normal_quantile(t);
                }
            }
            if (i + 1 < n) {
                scratch[static_cast<std::size_t>(i) * count + s] = y;
                if (sys.column_constant) {
                    run = run + sys.column_value[i] * y;
                }
            }
        }
        values[s] = f;
    }
}

} // namespace dps::simd::detail
