#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subsim/dmc.hpp"
#include "subsim/execution.hpp"
#include "subsim/model.hpp"
#include "subsim/subset_simulation.hpp"

namespace subsim {

// Mean, sample standard deviation (n - 1 denominator) and c.o.v. of a batch.
struct ReplicateStats {
    double mean = 0.0;
    double stddev = 0.0;
    /// stddev / mean; NaN when the mean is zero.
    double cov = 0.0;
    std::size_t count = 0;
};

[[nodiscard]] ReplicateStats summarize(std::span<const double> values);

struct SsRun {
    std::optional<SsEstimate> estimate;
    /// Why the run did not finish; empty on success.
    std::string error;
};

struct SsBatch {
    std::vector<SsRun> runs;
    /// Over finished runs only.
    ReplicateStats p_hat;
    double mean_total_samples = 0.0;
    std::size_t exclusions = 0;
};

struct DmcBatch {
    std::vector<DmcEstimate> runs;
    ReplicateStats p_hat;
    std::uint64_t n_samples = 0;
};

/// Replicate r runs on RandomStream(master_seed).derive(r). Aborted runs are
/// kept with their error and excluded from the statistics.
[[nodiscard]] SsBatch replicate_ss(const FailureSpec& spec, const SsConfig& config, std::size_t replicates,
                                   std::uint64_t master_seed, Execution exec = Execution::serial);

/// Replicate r runs on RandomStream(master_seed).derive(r).
[[nodiscard]] DmcBatch replicate_dmc(const FailureSpec& spec, std::uint64_t n_samples, std::size_t replicates,
                                     std::uint64_t master_seed, Execution exec = Execution::serial);

struct SweepSpec {
    std::size_t dim = 1000;
    std::vector<double> thresholds;
    std::size_t replicates = 100;
    SsConfig ss;
    /// Fixed DMC sample count; empty means the mean SS total sample count of
    /// the same row, rounded up.
    std::optional<std::uint64_t> dmc_samples;

    /// Throws DomainError on an empty grid, zero replicates or a bad SsConfig.
    void validate() const;
};

/// `points` evenly spaced values from lo to hi inclusive.
[[nodiscard]] std::vector<double> linspace(double lo, double hi, std::size_t points);

struct RunSummary {
    double y_star = 0.0;
    double p_true = 0.0;
    ReplicateStats ss;
    double ss_mean_total_samples = 0.0;
    ReplicateStats dmc;
    std::uint64_t dmc_samples = 0;
    double dmc_cov_theory = 0.0;
    std::size_t replicates = 0;
    std::size_t exclusions = 0;
};

using SweepProgress = std::function<void(std::size_t row, const RunSummary&)>;

/// SS versus DMC at matched budget over the threshold grid of a linear_sum
/// model. Row g uses batch seeds derived from (master_seed, g).
[[nodiscard]] std::vector<RunSummary> sweep_compare(const SweepSpec& sweep, std::uint64_t master_seed,
                                                    Execution exec = Execution::serial,
                                                    const SweepProgress& progress = {});

struct LevelTrace {
    SsEstimate estimate;
    /// Descending responses for levels 0..L.
    std::vector<std::vector<double>> responses;
    /// y*_1..y*_L.
    std::vector<double> thresholds;
    /// n_F(l) for l = 0..L.
    std::vector<std::size_t> n_failures;
};

/// Single run with the per-level response curves and failure counts.
[[nodiscard]] LevelTrace level_trace(const FailureSpec& spec, const SsConfig& config, std::uint64_t seed,
                                     Execution exec = Execution::serial);

}  // namespace subsim
