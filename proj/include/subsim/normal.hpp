#pragma once

namespace subsim {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard Gaussian density.
[[nodiscard]] double normal_pdf(double x) noexcept;

/// Log of the standard Gaussian density.
[[nodiscard]] double normal_log_pdf(double x) noexcept;

/// Standard Gaussian CDF, Phi(x).
[[nodiscard]] double normal_cdf(double x) noexcept;

/// Upper tail 1 - Phi(x), evaluated through erfc so deep tails keep full
/// relative accuracy.
[[nodiscard]] double normal_sf(double x) noexcept;

/// Phi^{-1}(q) for 0 < q < 1. Throws DomainError otherwise.
[[nodiscard]] double normal_quantile(double q);

/// Inverse survival function: x with normal_sf(x) = q. Accurate for tiny q,
/// where 1 - q would round away the information.
[[nodiscard]] double normal_isf(double q);

}  // namespace subsim
