#pragma once

namespace procure::normal {

inline constexpr double inv_sqrt_2pi = 0.39894228040143267794;

/// Standard normal density.
double pdf(double z) noexcept;

/// Standard normal CDF, computed from erfc so both tails keep relative accuracy.
double cdf(double z) noexcept;

/// Upper tail 1 - cdf(z) without cancellation.
double survival(double z) noexcept;

/// Inverse of cdf on (0,1). Returns -inf / +inf at 0 / 1.
double quantile(double p) noexcept;

}  // namespace procure::normal
