#pragma once

// Data-parallel kernels with a scalar reference and an AVX2 variant selected
// at runtime. All entry points give bit-identical output for every Isa.

#include "dps/simd/dispatch.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace dps::simd {

/// Box-probability problem after Cholesky factorization, in the form the
/// sequential-conditioning integrand consumes.
struct GenzSystem {
    int dim = 0;
    std::vector<double> chol;     ///< row-major dim x dim, lower triangle
    std::vector<double> inv_diag; ///< 1 / L_ii; unused on singular rows
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<unsigned char> singular; ///< L_ii == 0: row is a hard constraint
    /// Below the diagonal every column is constant (true for equicorrelation),
    /// which lets the conditional mean be a running sum instead of a dot product.
    bool column_constant = false;
    /// Below-diagonal value of each column when column_constant is set.
    std::vector<double> column_value;
    double singular_slack = 1e-10;
};

/// Evaluates the integrand for `count` samples.
///
/// `uniforms` holds (dim - 1) rows of `count` values in [0, 1), row-major
/// (uniforms[i * count + s]). `values` receives count integrand values.
/// `scratch` must hold at least dim * count doubles.
void genz_evaluate(const GenzSystem& sys, std::span<const double> uniforms, std::size_t count,
                   std::span<double> values, std::span<double> scratch, Isa isa);

// Elementwise batch entry points (mainly for equivalence tests).
void exp_nonpositive(std::span<const double> in, std::span<double> out, Isa isa);
void log_positive(std::span<const double> in, std::span<double> out, Isa isa);
void normal_cdf(std::span<const double> in, std::span<double> out, Isa isa);
void normal_quantile(std::span<const double> in, std::span<double> out, Isa isa);

namespace detail {

// Scalar reference over samples [begin, count).
void genz_scalar(const GenzSystem& sys, const double* uniforms, std::size_t count,
                 std::size_t begin, double* values, double* scratch);

#ifdef DPS_HAVE_AVX2_KERNEL
// Processes the largest multiple of 4 samples; returns how many were done.
std::size_t genz_avx2(const GenzSystem& sys, const double* uniforms, std::size_t count,
                      double* values, double* scratch);
std::size_t exp_avx2(const double* in, double* out, std::size_t n);
std::size_t log_avx2(const double* in, double* out, std::size_t n);
std::size_t cdf_avx2(const double* in, double* out, std::size_t n);
std::size_t quantile_avx2(const double* in, double* out, std::size_t n);
#endif

} // namespace detail

} // namespace dps::simd
