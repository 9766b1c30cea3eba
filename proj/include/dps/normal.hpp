#pragma once

// Standard normal distribution helpers backed by the C math library.

namespace dps {

/// Phi(x), the standard normal CDF.
double normal_cdf(double x);

/// Phi^-1(p) for p in (0, 1); returns -inf / +inf at 0 / 1.
double normal_quantile(double p);

} // namespace dps
