// Scalar reference vs AVX2 kernels: bit-identical output, and accuracy of
// the reference against the C math library.

#include "doctest.h"

#include "dps/normal.hpp"
#include "dps/simd/kernels.hpp"
#include "dps/simd/vmath.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

using namespace dps::simd;

namespace {

std::vector<double> grid(double lo, double hi, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return v;
}

template <class Batch>
void expect_identical(const std::vector<double>& in, Batch batch)
{
    std::vector<double> a(in.size()), b(in.size());
    batch(in, a, Isa::scalar);
    batch(in, b, Isa::avx2);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) {
            ++mismatches;
        }
    }
    CHECK(mismatches == 0);
}

} // namespace

TEST_CASE("dispatch reports a usable isa")
{
    CHECK(isa_available(Isa::scalar));
    const Isa isa = active_isa();
    CHECK(isa_available(isa));
    force_isa(Isa::scalar);
    CHECK(active_isa() == Isa::scalar);
    force_isa(std::nullopt);
}

TEST_CASE("exp_nonpositive matches libm")
{
    const auto xs = grid(-700.0, 0.0, 200001);
    std::vector<double> out(xs.size());
    exp_nonpositive(xs, out, Isa::scalar);
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double want = std::exp(xs[i]);
        worst = std::max(worst, std::fabs(out[i] - want) / want);
    }
    CHECK(worst < 1e-15);
    expect_identical(xs, [](auto in, auto o, Isa isa) { exp_nonpositive(in, o, isa); });
}

TEST_CASE("log_positive matches libm")
{
    std::mt19937_64 rng(7);
    std::vector<double> xs;
    for (int i = 0; i < 200000; ++i) {
        const double mant = 1.0 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const int exp = static_cast<int>(rng() % 2000) - 1000;
        xs.push_back(std::ldexp(mant, exp));
    }
    xs.push_back(1.0);
    xs.push_back(std::nextafter(1.0, 2.0));
    xs.push_back(std::nextafter(1.0, 0.0));
    xs.push_back(ref::kProbFloor);
    std::vector<double> out(xs.size());
    log_positive(xs, out, Isa::scalar);
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double want = std::log(xs[i]);
        const double err = std::fabs(out[i] - want);
        worst = std::max(worst, want == 0.0 ? err : err / std::fabs(want));
    }
    CHECK(worst < 1e-15);
    expect_identical(xs, [](auto in, auto o, Isa isa) { log_positive(in, o, isa); });
}

TEST_CASE("normal_cdf kernel matches erfc")
{
    auto xs = grid(-40.0, 40.0, 400001);
    xs.push_back(INFINITY);
    xs.push_back(-INFINITY);
    xs.push_back(0.0);
    xs.push_back(-0.0);
    std::vector<double> out(xs.size());
    normal_cdf(xs, out, Isa::scalar);
    double worst_abs = 0.0;
    double worst_tail_rel = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double want = dps::normal_cdf(xs[i]);
        worst_abs = std::max(worst_abs, std::fabs(out[i] - want));
        if (xs[i] < 0.0 && xs[i] > -37.0) {
            worst_tail_rel = std::max(worst_tail_rel, std::fabs(out[i] - want) / want);
        }
    }
    CHECK(worst_abs < 1e-15);
    CHECK(worst_tail_rel < 5e-13);
    expect_identical(xs, [](auto in, auto o, Isa isa) { normal_cdf(in, o, isa); });
}

TEST_CASE("normal_quantile kernel inverts the cdf")
{
    std::vector<double> ps = grid(1e-6, 1.0 - 1e-6, 200001);
    for (double e = -300; e <= -7; e += 0.5) {
        ps.push_back(std::pow(10.0, e));
        ps.push_back(1.0 - std::pow(10.0, e));
    }
    ps.push_back(ref::kProbFloor);
    ps.push_back(ref::kProbCeil);
    ps.push_back(0.5);
    ps.push_back(0.075);
    ps.push_back(0.925);
    std::vector<double> out(ps.size());
    normal_quantile(ps, out, Isa::scalar);
    double worst = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double want = dps::normal_quantile(ps[i]);
        const double err = std::fabs(out[i] - want);
        worst = std::max(worst, want == 0.0 ? err : err / std::fabs(want));
    }
    CHECK(worst < 1e-14);
    expect_identical(ps, [](auto in, auto o, Isa isa) { normal_quantile(in, o, isa); });
}

TEST_CASE("genz kernel is bit-identical across isas")
{
    // dense 5x5 factor and a column-constant one, with an odd sample count
    // so the scalar tail runs after the vector body
    for (bool column_constant : {false, true}) {
        GenzSystem sys;
        sys.dim = 5;
        sys.chol.assign(25, 0.0);
        sys.column_value.assign(5, 0.0);
        std::mt19937_64 rng(11);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < i; ++j) {
                const double v = column_constant ? 0.3 + 0.05 * j : static_cast<double>(rng() % 1000) / 2000.0;
                sys.chol[i * 5 + j] = v;
                sys.column_value[j] = 0.3 + 0.05 * j;
            }
            sys.chol[i * 5 + i] = 0.8;
        }
        sys.column_constant = column_constant;
        sys.inv_diag.assign(5, 1.0 / 0.8);
        sys.lower = {-1.0, -0.5, -INFINITY, -2.0, -1.5};
        sys.upper = {1.0, 1.5, 0.3, INFINITY, 1.5};
        sys.singular.assign(5, 0);
        const std::size_t count = 1027;
        std::vector<double> u(4 * count);
        for (auto& x : u) {
            x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        }
        std::vector<double> a(count), b(count), scratch(5 * count);
        genz_evaluate(sys, u, count, a, scratch, Isa::scalar);
        genz_evaluate(sys, u, count, b, scratch, Isa::avx2);
        std::size_t mismatches = 0;
        for (std::size_t s = 0; s < count; ++s) {
            mismatches += std::bit_cast<std::uint64_t>(a[s]) != std::bit_cast<std::uint64_t>(b[s]);
            CHECK(a[s] >= 0.0);
            CHECK(a[s] <= 1.0);
        }
        CHECK(mismatches == 0);
    }
}
