#include "subsim/dmc.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "subsim/errors.hpp"

namespace subsim {

DmcEstimate dmc_estimate(const FailureSpec& spec, std::uint64_t n_samples, RandomStream& stream) {
    if (n_samples == 0) throw DomainError("dmc_estimate: n_samples must be at least 1");

    std::vector<double> x(spec.model.dim());
    DmcEstimate out;
    out.n_samples = n_samples;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        draw_standard_point(stream, x);
        if (spec.fails(spec.model.evaluate(x))) ++out.n_failures;
    }
    out.evaluations_used = n_samples;
    out.p_hat = static_cast<double>(out.n_failures) / static_cast<double>(n_samples);
    if (out.n_failures > 0) out.theoretical_cov = dmc_cov(out.p_hat, static_cast<double>(n_samples));
    return out;
}

double dmc_cov(double p_f, double n_samples) { return std::sqrt((1.0 - p_f) / (n_samples * p_f)); }

std::uint64_t dmc_required_samples(double p_f, double target_cov) {
    if (!(p_f > 0.0 && p_f <= 1.0)) throw DomainError("dmc_required_samples: p_f must lie in (0, 1]");
    if (!(target_cov > 0.0)) throw DomainError("dmc_required_samples: target_cov must be positive");

    const double estimate = std::ceil((1.0 - p_f) / (p_f * target_cov * target_cov));
    if (!(estimate < 1.8e19)) throw DomainError("dmc_required_samples: sample count overflows 64 bits");
    auto n = static_cast<std::uint64_t>(std::max(1.0, estimate));
    // Correct for rounding in the closed form.
    while (n > 1 && dmc_cov(p_f, static_cast<double>(n - 1)) <= target_cov) --n;
    while (dmc_cov(p_f, static_cast<double>(n)) > target_cov) ++n;
    return n;
}

}  // namespace subsim
