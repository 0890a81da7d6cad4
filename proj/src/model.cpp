#include "subsim/model.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "subsim/errors.hpp"
#include "subsim/normal.hpp"

namespace subsim {

PerformanceModel::PerformanceModel(std::size_t dim, Function fn, std::string description)
    : dim_(dim), fn_(std::move(fn)), description_(std::move(description)) {
    if (dim_ == 0) throw DomainError("PerformanceModel: dimension must be at least 1");
    if (!fn_) throw DomainError("PerformanceModel: empty response function");
}

double PerformanceModel::evaluate(std::span<const double> x) const {
    if (x.size() != dim_) {
        throw DomainError("PerformanceModel::evaluate: expected " + std::to_string(dim_) + " coordinates, got " +
                          std::to_string(x.size()));
    }
    return fn_(x);
}

Sample make_sample(const PerformanceModel& model, std::vector<double> point) {
    Sample s;
    s.response = model.evaluate(point);
    s.point = std::move(point);
    return s;
}

int indicator(const FailureSpec& spec, const Sample& s) noexcept { return spec.fails(s.response) ? 1 : 0; }

void MarginalSpec::validate() const {
    if (mean.size() != stddev.size()) throw DomainError("MarginalSpec: mean and stddev sizes differ");
    for (double s : stddev) {
        if (!(s > 0.0)) throw DomainError("MarginalSpec: every stddev must be positive");
    }
}

std::vector<double> standardize(std::span<const double> x_physical, const MarginalSpec& marginals) {
    marginals.validate();
    if (x_physical.size() != marginals.dim()) throw DomainError("standardize: dimension mismatch");
    std::vector<double> z(x_physical.size());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = (x_physical[k] - marginals.mean[k]) / marginals.stddev[k];
    return z;
}

std::vector<double> destandardize(std::span<const double> z, const MarginalSpec& marginals) {
    marginals.validate();
    if (z.size() != marginals.dim()) throw DomainError("destandardize: dimension mismatch");
    std::vector<double> x(z.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = marginals.mean[k] + marginals.stddev[k] * z[k];
    return x;
}

PerformanceModel with_marginals(PerformanceModel physical, MarginalSpec marginals) {
    marginals.validate();
    if (marginals.dim() != physical.dim()) throw DomainError("with_marginals: dimension mismatch");
    const std::size_t d = physical.dim();
    std::string description = physical.description() + " (standardized)";
    return PerformanceModel(
        d,
        [physical = std::move(physical), marginals = std::move(marginals)](std::span<const double> z) {
            return physical.evaluate(destandardize(z, marginals));
        },
        std::move(description));
}

PerformanceModel linear_sum_model(std::size_t d) {
    if (d == 0) throw DomainError("linear_sum_model: dimension must be at least 1");
    return PerformanceModel(
        d, [](std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0); },
        "linear_sum(d=" + std::to_string(d) + ")");
}

double analytic_failure_probability(std::size_t d, double y_star) {
    if (d == 0) throw DomainError("analytic_failure_probability: dimension must be at least 1");
    return normal_sf(y_star / std::sqrt(static_cast<double>(d)));
}

double threshold_for_probability(std::size_t d, double p_target) {
    if (d == 0) throw DomainError("threshold_for_probability: dimension must be at least 1");
    if (!(p_target > 0.0 && p_target < 1.0)) {
        throw DomainError("threshold_for_probability: p_target must lie in (0, 1)");
    }
    return std::sqrt(static_cast<double>(d)) * normal_isf(p_target);
}

}  // namespace subsim
