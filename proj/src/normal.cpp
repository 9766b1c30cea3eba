#include "dps/normal.hpp"

#include "dps/simd/normal_coefficients.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace dps {

namespace {

template <std::size_t N>
double horner(const double (&c)[N], double x)
{
    double acc = c[0];
    for (std::size_t i = 1; i < N; ++i) {
        acc = acc * x + c[i];
    }
    return acc;
}

} // namespace

double normal_cdf(double x)
{
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p)
{
    namespace c = simd::coef;
    if (std::isnan(p) || p < 0.0 || p > 1.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (p == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (p == 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double q = p - 0.5;
    if (std::fabs(q) <= c::kCentralSplit) {
        const double r = c::kCentralShift - q * q;
        return q * horner(c::kCentralNum, r) / horner(c::kCentralDen, r);
    }
    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double val;
    if (r <= c::kTailSplit) {
        r -= c::kNearShift;
        val = horner(c::kNearNum, r) / horner(c::kNearDen, r);
    } else {
        r -= c::kFarShift;
        val = horner(c::kFarNum, r) / horner(c::kFarDen, r);
    }
    return q < 0.0 ? -val : val;
}

} // namespace dps
