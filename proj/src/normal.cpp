#include "subsim/normal.hpp"

#include <cmath>
#include <numbers>

#include "subsim/errors.hpp"

namespace subsim {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt2Pi = 2.50662827463100050242;

// Acklam's rational approximation for the lower half, q <= 0.5.
// Relative error about 1.15e-9 before refinement.
double quantile_lower_rational(double q) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double kLowBreak = 0.02425;

    if (q < kLowBreak) {
        const double t = std::sqrt(-2.0 * std::log(q));
        return (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
               ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    }
    const double t = q - 0.5;
    const double r = t * t;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * t /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Lower-half quantile with one Halley step against the erfc-based CDF.
double quantile_lower(double q) {
    double x = quantile_lower_rational(q);
    const double e = normal_cdf(x) - q;
    const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

void check_probability(double q, const char* what) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError(std::string(what) + ": probability must lie in (0, 1)");
}

}  // namespace

double normal_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_log_pdf(double x) noexcept { return -0.5 * x * x - std::log(kSqrt2Pi); }

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_sf(double x) noexcept { return 0.5 * std::erfc(x / kSqrt2); }

double normal_quantile(double q) {
    check_probability(q, "normal_quantile");
    if (q == 0.5) return 0.0;
    if (q < 0.5) return quantile_lower(q);
    // 1 - q is exact for q in [0.5, 1).
    return -quantile_lower(1.0 - q);
}

double normal_isf(double q) {
    check_probability(q, "normal_isf");
    if (q == 0.5) return 0.0;
    if (q < 0.5) return -quantile_lower(q);
    return quantile_lower(1.0 - q);
}

}  // namespace subsim
