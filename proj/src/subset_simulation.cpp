#include "subsim/subset_simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "subsim/errors.hpp"

namespace subsim {

namespace {

bool is_integral(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

// n points of dimension d, row-major, with their responses.
struct SampleBlock {
    std::size_t dim = 0;
    std::vector<double> points;
    std::vector<double> responses;

    SampleBlock(std::size_t n, std::size_t d) : dim(d), points(n * d), responses(n) {}

    std::span<double> row(std::size_t i) { return {points.data() + i * dim, dim}; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const { return {points.data() + i * dim, dim}; }
};

// Indices ordered by response, descending; ties keep insertion order.
std::vector<std::size_t> descending_order(const std::vector<double>& responses) {
    std::vector<std::size_t> order(responses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return responses[a] > responses[b]; });
    return order;
}

LevelRecord make_record(std::size_t level, double threshold, const SampleBlock& block,
                        const std::vector<std::size_t>& order, const FailureSpec& spec, bool keep_samples) {
    LevelRecord rec;
    rec.level = level;
    rec.threshold = threshold;
    rec.sorted_responses.reserve(order.size());
    for (auto i : order) rec.sorted_responses.push_back(block.responses[i]);
    rec.n_failures = static_cast<std::size_t>(
        std::count_if(block.responses.begin(), block.responses.end(), [&](double y) { return spec.fails(y); }));
    if (keep_samples) {
        rec.samples.reserve(block.responses.size());
        for (std::size_t i = 0; i < block.responses.size(); ++i) {
            const auto r = block.row(i);
            rec.samples.push_back(Sample{{r.begin(), r.end()}, block.responses[i]});
        }
    }
    return rec;
}

// True when every row tied with the np-th largest response is the same point.
bool tie_is_repeated_state(const SampleBlock& block, const std::vector<std::size_t>& order, std::size_t np) {
    const double v = block.responses[order[np - 1]];
    const auto reference = block.row(order[np - 1]);
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (block.responses[order[r]] != v) continue;
        const auto other = block.row(order[r]);
        if (!std::equal(reference.begin(), reference.end(), other.begin())) return false;
    }
    return true;
}

}  // namespace

void SsConfig::validate() const {
    const double p = level_probability;
    if (!(p > 0.0 && p < 1.0)) throw DomainError("level_probability must lie in (0, 1)");
    if (samples_per_level < 2) throw DomainError("samples_per_level must be at least 2");
    const double np = static_cast<double>(samples_per_level) * p;
    if (!is_integral(np) || !is_integral(1.0 / p)) {
        std::ostringstream msg;
        msg << "n*p and 1/p must be integers; got n=" << samples_per_level << ", p=" << p;
        throw DomainError(msg.str());
    }
    if (std::round(np) < 1.0 || std::round(np) >= static_cast<double>(samples_per_level)) {
        throw DomainError("n*p must satisfy 1 <= n*p < n");
    }
    if (max_levels < 1) throw DomainError("max_levels must be at least 1");
    for (double s : proposal.spread) {
        if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("proposal spread must be positive and finite");
    }
}

std::size_t SsConfig::seeds_per_level() const {
    return static_cast<std::size_t>(std::llround(static_cast<double>(samples_per_level) * level_probability));
}

std::size_t SsConfig::chain_length() const { return static_cast<std::size_t>(std::llround(1.0 / level_probability)); }

ThresholdSelection select_threshold(std::span<const double> sorted_desc, double level_probability) {
    const std::size_t n = sorted_desc.size();
    const double np_real = static_cast<double>(n) * level_probability;
    if (!is_integral(np_real)) throw DomainError("select_threshold: n*p must be an integer");
    const auto np = static_cast<std::size_t>(std::llround(np_real));
    if (np < 1 || np >= n) throw DomainError("select_threshold: need 1 <= n*p < n");

    ThresholdSelection out;
    const double upper = sorted_desc[np - 1];
    const double lower = sorted_desc[np];
    out.threshold = 0.5 * (upper + lower);
    out.tie = upper == lower;
    out.exceedances = static_cast<std::size_t>(
        std::count_if(sorted_desc.begin(), sorted_desc.end(), [&](double y) { return y > out.threshold; }));
    return out;
}

SsEstimate run_subset_simulation(const FailureSpec& spec, const SsConfig& config, RandomStream& stream,
                                 [[maybe_unused]] Execution exec) {
    config.validate();
    config.proposal.validate(spec.model.dim());

    const std::size_t n = config.samples_per_level;
    const std::size_t d = spec.model.dim();
    const std::size_t np = config.seeds_per_level();
    const double inv_n = 1.0 / static_cast<double>(n);

    SsEstimate est;
    SampleBlock current(n, d);

    for (std::size_t i = 0; i < n; ++i) {
        auto x = current.row(i);
        draw_standard_point(stream, x);
        current.responses[i] = spec.model.evaluate(x);
    }
    auto order = descending_order(current.responses);
    {
        LevelRecord rec = make_record(0, std::numeric_limits<double>::quiet_NaN(), current, order, spec,
                                      config.keep_samples);
        rec.evaluations_used = n;
        rec.new_samples = n;
        est.level_records.push_back(std::move(rec));
    }
    est.total_samples = n;
    est.total_evaluations = n;

    ProposalSpec proposal = config.proposal;
    double level_product = 1.0;

    for (std::size_t level = 0;; ++level) {
        const LevelRecord& last = est.level_records.back();
        if (last.n_failures >= np) {
            est.levels = level;
            est.p_hat = level_product * (static_cast<double>(last.n_failures) * inv_n);
            return est;
        }
        if (level == config.max_levels) {
            throw SimulationAborted(SimulationAborted::Reason::budget_exceeded,
                                    "subset simulation: no stop after max_levels=" +
                                        std::to_string(config.max_levels) + " conditional levels",
                                    std::move(est.level_records));
        }

        ThresholdSelection sel = select_threshold(last.sorted_responses, config.level_probability);
        const double previous_threshold = est.thresholds.empty() ? -std::numeric_limits<double>::infinity()
                                                                 : est.thresholds.back();
        bool repeated_state = false;
        if (sel.tie && tie_is_repeated_state(current, order, np)) {
            // The boundary value is one chain state listed several times. Put
            // the threshold just below it so exactly the top np rows seed.
            const double below = std::nextafter(sel.threshold, -std::numeric_limits<double>::infinity());
            if (below > previous_threshold) {
                sel.threshold = below;
                repeated_state = true;
            }
        }
        const std::size_t n_seeds = repeated_state ? np : sel.exceedances;
        if (n_seeds == 0) {
            throw SimulationAborted(SimulationAborted::Reason::degenerate_level,
                                    "subset simulation: tied responses left no sample above the next threshold "
                                    "at level " + std::to_string(level + 1),
                                    std::move(est.level_records));
        }

        // Seeds are the top samples; chain c writes rows [offset[c], offset[c+1]).
        std::vector<std::size_t> offsets(n_seeds + 1, 0);
        const std::size_t base = n / n_seeds;
        const std::size_t extra = n % n_seeds;
        for (std::size_t c = 0; c < n_seeds; ++c) offsets[c + 1] = offsets[c] + base + (c < extra ? 1 : 0);

        const std::size_t next_level = level + 1;
        const ModifiedMetropolis kernel(spec, sel.threshold, proposal);
        SampleBlock next(n, d);
        std::vector<MmaStats> chain_stats(n_seeds);
        std::exception_ptr failure;

        const auto n_chains = static_cast<std::int64_t>(n_seeds);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
        for (std::int64_t c = 0; c < n_chains; ++c) {
            try {
                const auto ci = static_cast<std::size_t>(c);
                const std::size_t seed_index = order[ci];
                const std::size_t begin = offsets[ci];
                const std::size_t length = offsets[ci + 1] - begin;
                RandomStream chain_stream = stream.derive({next_level, ci});
                kernel.run_chain(current.row(seed_index), current.responses[seed_index], length,
                                 std::span<double>(next.points).subspan(begin * d, length * d),
                                 std::span<double>(next.responses).subspan(begin, length), chain_stream,
                                 chain_stats[ci]);
            } catch (...) {
#pragma omp critical(subsim_chain_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);

        MmaStats stats;
        for (const auto& s : chain_stats) stats += s;

        current = std::move(next);
        order = descending_order(current.responses);

        LevelRecord rec = make_record(next_level, sel.threshold, current, order, spec, config.keep_samples);
        rec.acceptance_stats = stats;
        rec.evaluations_used = stats.evaluations;
        rec.new_samples = n - n_seeds;
        rec.n_seeds = n_seeds;
        rec.conditional_probability = static_cast<double>(n_seeds) * inv_n;
        rec.tie_warning = !repeated_state && n_seeds != np;
        rec.repeated_state_tie = repeated_state;
        rec.proposal = proposal;

        level_product *= rec.conditional_probability;
        est.tie_warning = est.tie_warning || rec.tie_warning;
        est.thresholds.push_back(sel.threshold);
        est.total_samples += rec.new_samples;
        est.total_evaluations += rec.evaluations_used;
        est.level_records.push_back(std::move(rec));

        if (config.adapt) proposal = adapt_spread(stats, proposal);
    }
}

SsEstimate run_subset_simulation(const FailureSpec& spec, const SsConfig& config, Execution exec) {
    RandomStream stream(config.seed);
    return run_subset_simulation(spec, config, stream, exec);
}

std::size_t expected_levels(double p_f, double level_probability) {
    if (!(p_f > 0.0 && p_f < 1.0)) throw DomainError("expected_levels: p_f must lie in (0, 1)");
    if (!(level_probability > 0.0 && level_probability < 1.0)) {
        throw DomainError("expected_levels: level probability must lie in (0, 1)");
    }
    double ratio = std::log(p_f) / std::log(level_probability);
    // Snap exact powers of p that log() misses by an ulp.
    if (std::abs(ratio - std::round(ratio)) < 1e-9) ratio = std::round(ratio);
    const double levels = std::floor(ratio);
    return levels <= 0.0 ? 0 : static_cast<std::size_t>(levels);
}

std::uint64_t expected_total_samples(std::size_t levels, const SsConfig& config) {
    const std::uint64_t n = config.samples_per_level;
    return n + levels * (n - config.seeds_per_level());
}

}  // namespace subsim
