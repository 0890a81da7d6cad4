#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace subsim {

// Deterministic response function y = g(x) on d-dimensional standard
// Gaussian input space. Implementations must be stateless: replicate
// workers call evaluate() concurrently.
class PerformanceModel {
public:
    using Function = std::function<double(std::span<const double>)>;

    PerformanceModel(std::size_t dim, Function fn, std::string description);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] const std::string& description() const noexcept { return description_; }

    /// Throws DomainError if x.size() != dim().
    [[nodiscard]] double evaluate(std::span<const double> x) const;

private:
    std::size_t dim_;
    Function fn_;
    std::string description_;
};

// Failure is the event g(x) > critical_threshold (strict).
struct FailureSpec {
    PerformanceModel model;
    double critical_threshold;

    [[nodiscard]] bool fails(double response) const noexcept { return response > critical_threshold; }
};

// A point in standard Gaussian space with its cached response.
struct Sample {
    std::vector<double> point;
    double response = 0.0;
};

[[nodiscard]] Sample make_sample(const PerformanceModel& model, std::vector<double> point);

/// 1 iff s.response > y*, else 0.
[[nodiscard]] int indicator(const FailureSpec& spec, const Sample& s) noexcept;

// Independent marginals described by location and scale.
struct MarginalSpec {
    std::vector<double> mean;
    std::vector<double> stddev;

    /// Throws DomainError on size mismatch or a non-positive stddev.
    void validate() const;
    [[nodiscard]] std::size_t dim() const noexcept { return mean.size(); }
};

/// z_k = (x_k - mean_k) / stddev_k.
[[nodiscard]] std::vector<double> standardize(std::span<const double> x_physical, const MarginalSpec& marginals);

/// x_k = mean_k + stddev_k * z_k.
[[nodiscard]] std::vector<double> destandardize(std::span<const double> z, const MarginalSpec& marginals);

/// Lifts a model defined on physical inputs to standard Gaussian space.
[[nodiscard]] PerformanceModel with_marginals(PerformanceModel physical, MarginalSpec marginals);

/// g(x) = sum of the coordinates. Throws DomainError for d == 0.
[[nodiscard]] PerformanceModel linear_sum_model(std::size_t d);

/// Exact P(sum of d standard normals > y_star) = 1 - Phi(y_star / sqrt(d)).
[[nodiscard]] double analytic_failure_probability(std::size_t d, double y_star);

/// sqrt(d) * Phi^{-1}(1 - p_target); inverse of analytic_failure_probability.
[[nodiscard]] double threshold_for_probability(std::size_t d, double p_target);

}  // namespace subsim
