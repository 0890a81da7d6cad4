#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "subsim/execution.hpp"
#include "subsim/mma.hpp"
#include "subsim/model.hpp"
#include "subsim/random_stream.hpp"

namespace subsim {

struct SsConfig {
    double level_probability = 0.1;
    std::size_t samples_per_level = 1000;
    ProposalSpec proposal = ProposalSpec::gaussian(1.0);
    bool adapt = false;
    std::size_t max_levels = 50;
    std::uint64_t seed = 0;
    /// Retain every level's points in the records (n * d doubles per level).
    bool keep_samples = false;

    /// Throws DomainError naming the first violated invariant.
    void validate() const;

    /// n * p.
    [[nodiscard]] std::size_t seeds_per_level() const;
    /// 1 / p.
    [[nodiscard]] std::size_t chain_length() const;
};

struct LevelRecord {
    std::size_t level = 0;
    /// Intermediate threshold defining this level's domain; NaN at level 0.
    double threshold = 0.0;
    /// Responses of the level's n samples, non-increasing.
    std::vector<double> sorted_responses;
    /// Samples with response above the critical threshold.
    std::size_t n_failures = 0;
    /// Chain statistics; empty at level 0.
    std::optional<MmaStats> acceptance_stats;
    std::uint64_t evaluations_used = 0;
    /// Samples generated at this level (seeds excluded).
    std::uint64_t new_samples = 0;
    /// Number of chains (seeds) that built this level; 0 at level 0.
    std::size_t n_seeds = 0;
    /// Estimated P(F_l | F_{l-1}) = n_seeds / n; 1 at level 0.
    double conditional_probability = 1.0;
    /// Threshold order statistics were tied, so n_seeds may differ from n * p.
    bool tie_warning = false;
    /// The tied boundary rows were copies of one chain state; the threshold
    /// was placed just below that response so exactly n * p rows seeded.
    bool repeated_state_tie = false;
    /// Proposal used by this level's chains.
    std::optional<ProposalSpec> proposal;
    /// Level samples in pooled order, only with SsConfig::keep_samples.
    std::vector<Sample> samples;
};

struct SsEstimate {
    double p_hat = 0.0;
    std::size_t levels = 0;
    std::vector<LevelRecord> level_records;
    /// y*_1 < ... < y*_L.
    std::vector<double> thresholds;
    std::uint64_t total_samples = 0;
    std::uint64_t total_evaluations = 0;
    bool tie_warning = false;
};

struct ThresholdSelection {
    double threshold = 0.0;
    /// Responses strictly above the threshold.
    std::size_t exceedances = 0;
    /// The np-th and (np+1)-th responses were equal.
    bool tie = false;
};

/// Midpoint of the np-th and (np+1)-th largest responses. `sorted_desc`
/// must be non-increasing with 1 <= np < n.
[[nodiscard]] ThresholdSelection select_threshold(std::span<const double> sorted_desc, double level_probability);

// Raised when a run cannot finish; carries the records produced so far.
class SimulationAborted : public std::runtime_error {
public:
    enum class Reason { budget_exceeded, degenerate_level };

    SimulationAborted(Reason reason, const std::string& message, std::vector<LevelRecord> partial)
        : std::runtime_error(message), reason_(reason), partial_(std::move(partial)) {}

    [[nodiscard]] Reason reason() const noexcept { return reason_; }
    [[nodiscard]] const std::vector<LevelRecord>& partial_records() const noexcept { return partial_; }

private:
    Reason reason_;
    std::vector<LevelRecord> partial_;
};

/// Subset Simulation. Level 0 draws n points from `stream` exactly as
/// dmc_estimate would; chain (c) at level l draws from stream.derive({l, c}),
/// so the result does not depend on chain execution order.
[[nodiscard]] SsEstimate run_subset_simulation(const FailureSpec& spec, const SsConfig& config, RandomStream& stream,
                                               Execution exec = Execution::serial);

/// Same, with a stream seeded from config.seed.
[[nodiscard]] SsEstimate run_subset_simulation(const FailureSpec& spec, const SsConfig& config,
                                               Execution exec = Execution::serial);

/// Planning estimate of the number of conditional levels: the L with
/// p^(L+1) < p_f <= p^L, i.e. floor(log p_f / log p).
[[nodiscard]] std::size_t expected_levels(double p_f, double level_probability);

/// n + L (n - n p): samples generated by a run with L levels and no ties.
[[nodiscard]] std::uint64_t expected_total_samples(std::size_t levels, const SsConfig& config);

}  // namespace subsim
