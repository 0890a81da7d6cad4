#pragma once

#include <cstdint>
#include <optional>

#include "subsim/model.hpp"
#include "subsim/random_stream.hpp"

namespace subsim {

struct DmcEstimate {
    double p_hat = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t n_failures = 0;
    /// sqrt((1 - p_hat) / (N p_hat)); empty when no failure was observed.
    std::optional<double> theoretical_cov;
    std::uint64_t evaluations_used = 0;
};

/// Direct Monte Carlo: fraction of N i.i.d. standard Gaussian points with
/// g(x) > y*. Points are streamed, one d-vector at a time.
[[nodiscard]] DmcEstimate dmc_estimate(const FailureSpec& spec, std::uint64_t n_samples, RandomStream& stream);

/// c.o.v. of the direct estimator for true probability p with N samples.
[[nodiscard]] double dmc_cov(double p_f, double n_samples);

/// Smallest N with dmc_cov(p_f, N) <= target_cov.
[[nodiscard]] std::uint64_t dmc_required_samples(double p_f, double target_cov);

}  // namespace subsim
