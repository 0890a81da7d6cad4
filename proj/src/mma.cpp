#include "subsim/mma.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "subsim/errors.hpp"

namespace subsim {

void ProposalSpec::validate(std::size_t dim) const {
    if (spread.size() != 1 && spread.size() != dim) {
        throw DomainError("ProposalSpec: spread must have 1 or " + std::to_string(dim) + " entries");
    }
    for (double s : spread) {
        if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("ProposalSpec: spread must be positive and finite");
    }
}

MmaStats& MmaStats::operator+=(const MmaStats& other) noexcept {
    coordinate_proposals += other.coordinate_proposals;
    coordinate_acceptances += other.coordinate_acceptances;
    candidate_accept_count += other.candidate_accept_count;
    chain_steps += other.chain_steps;
    evaluations += other.evaluations;
    return *this;
}

double MmaStats::acceptance_rate() const noexcept {
    return chain_steps == 0 ? 0.0 : static_cast<double>(candidate_accept_count) / static_cast<double>(chain_steps);
}

ModifiedMetropolis::ModifiedMetropolis(const FailureSpec& spec, double level_threshold, ProposalSpec proposal,
                                       TargetMarginals marginals)
    : spec_(&spec), threshold_(level_threshold), proposal_(std::move(proposal)), marginals_(std::move(marginals)) {
    proposal_.validate(spec.model.dim());
    const auto n = marginals_.log_density.size();
    if (n != 0 && n != 1 && n != spec.model.dim()) {
        throw DomainError("TargetMarginals: need 0, 1 or d log-densities");
    }
}

double ModifiedMetropolis::log_ratio(std::size_t k, double from, double to) const {
    const auto& lp = marginals_.log_density.size() == 1 ? marginals_.log_density.front() : marginals_.log_density[k];
    return lp(to) - lp(from);
}

double ModifiedMetropolis::step(std::span<const double> x, double y, std::span<double> out, RandomStream& stream,
                                MmaStats& stats) const {
    const std::size_t d = x.size();
    if (!(y > threshold_)) throw InvariantError("mma step: current state is outside the level domain");
    if (d != spec_->model.dim() || out.size() != d) throw InvariantError("mma step: dimension mismatch");

    const bool gaussian_target = marginals_.log_density.empty();
    const bool gaussian_proposal = proposal_.kind == ProposalKind::gaussian;
    std::uint64_t accepted = 0;

    for (std::size_t k = 0; k < d; ++k) {
        const double xk = x[k];
        const double eta = gaussian_proposal ? xk + proposal_.spread_at(k) * stream.next_normal()
                                             : xk + proposal_.spread_at(k) * (2.0 * stream.next_unit() - 1.0);
        bool take = false;
        if (gaussian_target) {
            // phi(eta)/phi(x) >= 1 exactly when |eta| <= |x|.
            const double log_r = 0.5 * (xk * xk - eta * eta);
            take = log_r >= 0.0 || stream.next_unit() < std::exp(log_r);
        } else {
            const double log_r = log_ratio(k, xk, eta);
            take = log_r >= 0.0 || stream.next_unit() < std::exp(log_r);
        }
        if (take && eta != xk) {
            out[k] = eta;
            ++accepted;
        } else {
            out[k] = xk;
        }
    }

    stats.coordinate_proposals += d;
    stats.coordinate_acceptances += accepted;
    ++stats.chain_steps;

    if (accepted == 0) return y;

    ++stats.evaluations;
    const double candidate = spec_->model.evaluate(out);
    if (candidate > threshold_) {
        ++stats.candidate_accept_count;
        return candidate;
    }
    std::copy(x.begin(), x.end(), out.begin());
    return y;
}

void ModifiedMetropolis::run_chain(std::span<const double> seed, double seed_response, std::size_t length,
                                   std::span<double> points, std::span<double> responses, RandomStream& stream,
                                   MmaStats& stats) const {
    const std::size_t d = seed.size();
    if (length == 0) throw DomainError("run_chain: chain length must be at least 1");
    if (points.size() != length * d || responses.size() != length) {
        throw InvariantError("run_chain: output buffers have the wrong size");
    }
    std::copy(seed.begin(), seed.end(), points.begin());
    responses[0] = seed_response;
    for (std::size_t j = 1; j < length; ++j) {
        responses[j] = step(points.subspan((j - 1) * d, d), responses[j - 1], points.subspan(j * d, d), stream, stats);
    }
}

double coordinate_acceptance_probability(double from, double to) noexcept {
    return std::min(1.0, std::exp(0.5 * (from * from - to * to)));
}

Sample mma_step(const Sample& current, const FailureSpec& spec, double level_threshold, const ProposalSpec& proposal,
                RandomStream& stream, MmaStats& stats) {
    const ModifiedMetropolis kernel(spec, level_threshold, proposal);
    Sample next;
    next.point.resize(current.point.size());
    next.response = kernel.step(current.point, current.response, next.point, stream, stats);
    return next;
}

std::vector<Sample> run_chain(const Sample& seed, std::size_t chain_length, const FailureSpec& spec,
                              double level_threshold, const ProposalSpec& proposal, RandomStream& stream,
                              MmaStats& stats) {
    if (chain_length == 0) throw DomainError("run_chain: chain length must be at least 1");
    const ModifiedMetropolis kernel(spec, level_threshold, proposal);
    if (!(seed.response > level_threshold)) throw InvariantError("run_chain: seed is outside the level domain");

    std::vector<Sample> chain;
    chain.reserve(chain_length);
    chain.push_back(seed);
    for (std::size_t j = 1; j < chain_length; ++j) {
        Sample next;
        next.point.resize(seed.point.size());
        next.response = kernel.step(chain.back().point, chain.back().response, next.point, stream, stats);
        chain.push_back(std::move(next));
    }
    return chain;
}

ProposalSpec adapt_spread(const MmaStats& stats, const ProposalSpec& proposal) {
    if (stats.chain_steps == 0) throw DomainError("adapt_spread: no chain steps recorded");
    const double rate = stats.acceptance_rate();
    double factor = 1.0;
    if (rate < kAdaptLowRate) {
        factor = kAdaptShrink;
    } else if (rate > kAdaptHighRate) {
        factor = kAdaptGrow;
    }
    ProposalSpec out = proposal;
    for (auto& s : out.spread) s = std::clamp(s * factor, kMinSpread, kMaxSpread);
    return out;
}

}  // namespace subsim
