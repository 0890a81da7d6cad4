#include "subsim/experiments.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <numeric>

#include "subsim/errors.hpp"

namespace subsim {

namespace {

constexpr std::uint64_t kSsTag = 0;
constexpr std::uint64_t kDmcTag = 1;

}  // namespace

ReplicateStats summarize(std::span<const double> values) {
    ReplicateStats out;
    out.count = values.size();
    if (values.empty()) {
        out.mean = out.stddev = out.cov = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    out.cov = out.mean != 0.0 ? out.stddev / out.mean : std::numeric_limits<double>::quiet_NaN();
    return out;
}

SsBatch replicate_ss(const FailureSpec& spec, const SsConfig& config, std::size_t replicates,
                     std::uint64_t master_seed, [[maybe_unused]] Execution exec) {
    if (replicates == 0) throw DomainError("replicate_ss: replicates must be at least 1");
    config.validate();

    const RandomStream master(master_seed);
    SsBatch batch;
    batch.runs.resize(replicates);

    const auto count = static_cast<std::int64_t>(replicates);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
    for (std::int64_t r = 0; r < count; ++r) {
        auto& run = batch.runs[static_cast<std::size_t>(r)];
        RandomStream stream = master.derive(static_cast<std::uint64_t>(r));
        try {
            run.estimate = run_subset_simulation(spec, config, stream, Execution::serial);
        } catch (const SimulationAborted& e) {
            run.error = e.what();
        } catch (const std::exception& e) {
            run.error = std::string("unexpected: ") + e.what();
        }
    }

    std::vector<double> p_hats;
    double total_samples = 0.0;
    for (const auto& run : batch.runs) {
        if (!run.estimate) {
            ++batch.exclusions;
            continue;
        }
        p_hats.push_back(run.estimate->p_hat);
        total_samples += static_cast<double>(run.estimate->total_samples);
    }
    batch.p_hat = summarize(p_hats);
    batch.mean_total_samples =
        p_hats.empty() ? 0.0 : total_samples / static_cast<double>(p_hats.size());
    return batch;
}

DmcBatch replicate_dmc(const FailureSpec& spec, std::uint64_t n_samples, std::size_t replicates,
                       std::uint64_t master_seed, [[maybe_unused]] Execution exec) {
    if (replicates == 0) throw DomainError("replicate_dmc: replicates must be at least 1");
    if (n_samples == 0) throw DomainError("replicate_dmc: n_samples must be at least 1");

    const RandomStream master(master_seed);
    DmcBatch batch;
    batch.n_samples = n_samples;
    batch.runs.resize(replicates);

    const auto count = static_cast<std::int64_t>(replicates);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
    for (std::int64_t r = 0; r < count; ++r) {
        RandomStream stream = master.derive(static_cast<std::uint64_t>(r));
        batch.runs[static_cast<std::size_t>(r)] = dmc_estimate(spec, n_samples, stream);
    }

    std::vector<double> p_hats;
    p_hats.reserve(replicates);
    for (const auto& run : batch.runs) p_hats.push_back(run.p_hat);
    batch.p_hat = summarize(p_hats);
    return batch;
}

void SweepSpec::validate() const {
    if (dim == 0) throw DomainError("sweep: dimension must be at least 1");
    if (thresholds.empty()) throw DomainError("sweep: threshold grid is empty");
    if (replicates == 0) throw DomainError("sweep: replicates must be at least 1");
    if (dmc_samples && *dmc_samples == 0) throw DomainError("sweep: fixed DMC sample count must be positive");
    ss.validate();
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
    if (points == 0) return {};
    if (points == 1) return {lo};
    std::vector<double> out(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

std::vector<RunSummary> sweep_compare(const SweepSpec& sweep, std::uint64_t master_seed, Execution exec,
                                      const SweepProgress& progress) {
    sweep.validate();
    const RandomStream master(master_seed);
    std::vector<RunSummary> rows;
    rows.reserve(sweep.thresholds.size());

    for (std::size_t g = 0; g < sweep.thresholds.size(); ++g) {
        const double y_star = sweep.thresholds[g];
        const FailureSpec spec{linear_sum_model(sweep.dim), y_star};

        RunSummary row;
        row.y_star = y_star;
        row.p_true = analytic_failure_probability(sweep.dim, y_star);
        row.replicates = sweep.replicates;

        const auto ss = replicate_ss(spec, sweep.ss, sweep.replicates, master.derive({g, kSsTag}).key(), exec);
        row.ss = ss.p_hat;
        row.ss_mean_total_samples = ss.mean_total_samples;
        row.exclusions = ss.exclusions;

        if (sweep.dmc_samples) {
            row.dmc_samples = *sweep.dmc_samples;
        } else {
            row.dmc_samples = static_cast<std::uint64_t>(std::ceil(ss.mean_total_samples));
        }
        if (row.dmc_samples > 0) {
            const auto dmc = replicate_dmc(spec, row.dmc_samples, sweep.replicates,
                                           master.derive({g, kDmcTag}).key(), exec);
            row.dmc = dmc.p_hat;
            row.dmc_cov_theory = dmc_cov(row.p_true, static_cast<double>(row.dmc_samples));
        } else {
            row.dmc = summarize({});
            row.dmc_cov_theory = std::numeric_limits<double>::quiet_NaN();
        }

        if (progress) progress(g, row);
        rows.push_back(row);
    }
    return rows;
}

LevelTrace level_trace(const FailureSpec& spec, const SsConfig& config, std::uint64_t seed, Execution exec) {
    RandomStream stream(seed);
    LevelTrace trace;
    trace.estimate = run_subset_simulation(spec, config, stream, exec);
    for (const auto& rec : trace.estimate.level_records) {
        trace.responses.push_back(rec.sorted_responses);
        trace.n_failures.push_back(rec.n_failures);
    }
    trace.thresholds = trace.estimate.thresholds;
    return trace;
}

}  // namespace subsim
