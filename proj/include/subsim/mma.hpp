#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "subsim/model.hpp"
#include "subsim/random_stream.hpp"

namespace subsim {

enum class ProposalKind { gaussian, uniform };

// Symmetric one-dimensional proposal centred at the current coordinate.
// `spread` is the standard deviation (gaussian) or half-width (uniform);
// a single entry is broadcast to every coordinate.
struct ProposalSpec {
    ProposalKind kind = ProposalKind::gaussian;
    std::vector<double> spread{1.0};

    [[nodiscard]] static ProposalSpec gaussian(double sigma = 1.0) { return {ProposalKind::gaussian, {sigma}}; }
    [[nodiscard]] static ProposalSpec uniform(double half_width) { return {ProposalKind::uniform, {half_width}}; }

    [[nodiscard]] double spread_at(std::size_t k) const noexcept {
        return spread.size() == 1 ? spread.front() : spread[k];
    }

    /// Throws DomainError unless every spread is positive and the size is 1 or dim.
    void validate(std::size_t dim) const;
};

struct MmaStats {
    std::uint64_t coordinate_proposals = 0;
    std::uint64_t coordinate_acceptances = 0;
    /// Chain steps that moved to a new point.
    std::uint64_t candidate_accept_count = 0;
    std::uint64_t chain_steps = 0;
    std::uint64_t evaluations = 0;

    MmaStats& operator+=(const MmaStats& other) noexcept;

    /// candidate_accept_count / chain_steps, or 0 when no step was taken.
    [[nodiscard]] double acceptance_rate() const noexcept;
};

// Log-density of each independent input marginal. Empty means standard
// normal for every coordinate; a single entry is broadcast.
struct TargetMarginals {
    std::vector<std::function<double(double)>> log_density;
};

// Modified Metropolis transition kernel targeting the standard Gaussian
// (or the given independent marginals) conditioned on g(x) > level_threshold.
//
// Each coordinate is proposed and accepted on its own against the marginal
// density ratio. The assembled candidate is then kept only if it stays above
// the level threshold. When no coordinate moves, g is not evaluated.
class ModifiedMetropolis {
public:
    ModifiedMetropolis(const FailureSpec& spec, double level_threshold, ProposalSpec proposal,
                       TargetMarginals marginals = {});

    [[nodiscard]] double level_threshold() const noexcept { return threshold_; }
    [[nodiscard]] const ProposalSpec& proposal() const noexcept { return proposal_; }

    /// One transition from (x, y). Writes the next state to `out` and
    /// returns its response. Throws InvariantError if y <= level threshold.
    double step(std::span<const double> x, double y, std::span<double> out, RandomStream& stream,
                MmaStats& stats) const;

    /// Writes `length` states row-major into `points` (length * d values)
    /// and `responses`; row 0 is the seed.
    void run_chain(std::span<const double> seed, double seed_response, std::size_t length, std::span<double> points,
                   std::span<double> responses, RandomStream& stream, MmaStats& stats) const;

private:
    [[nodiscard]] double log_ratio(std::size_t k, double from, double to) const;

    const FailureSpec* spec_;
    double threshold_;
    ProposalSpec proposal_;
    TargetMarginals marginals_;
};

/// min{1, phi(to) / phi(from)}: probability that a proposed coordinate move
/// from `from` to `to` is accepted under a standard normal marginal.
[[nodiscard]] double coordinate_acceptance_probability(double from, double to) noexcept;

[[nodiscard]] Sample mma_step(const Sample& current, const FailureSpec& spec, double level_threshold,
                              const ProposalSpec& proposal, RandomStream& stream, MmaStats& stats);

/// Chain of exactly chain_length samples; element 0 is the seed.
[[nodiscard]] std::vector<Sample> run_chain(const Sample& seed, std::size_t chain_length, const FailureSpec& spec,
                                            double level_threshold, const ProposalSpec& proposal,
                                            RandomStream& stream, MmaStats& stats);

inline constexpr double kAdaptLowRate = 0.3;
inline constexpr double kAdaptHighRate = 0.5;
inline constexpr double kAdaptShrink = 0.7;
inline constexpr double kAdaptGrow = 1.3;
inline constexpr double kMinSpread = 1e-3;
inline constexpr double kMaxSpread = 1e3;

/// Moves the spread toward a 30-50% candidate acceptance band: x0.7 below it,
/// x1.3 above it, clamped to [1e-3, 1e3]. Throws DomainError if no steps ran.
[[nodiscard]] ProposalSpec adapt_spread(const MmaStats& stats, const ProposalSpec& proposal);

}  // namespace subsim
