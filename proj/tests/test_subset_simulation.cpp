#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "subsim/dmc.hpp"
#include "subsim/errors.hpp"
#include "subsim/subset_simulation.hpp"
#include "support/reference_ss.hpp"

using namespace subsim;

namespace {

SsConfig small_config(std::uint64_t seed = 0, std::size_t n = 500) {
    SsConfig c;
    c.samples_per_level = n;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("select_threshold") {
    const std::vector<double> ys{10.0, 9.0, 8.0, 7.0, 6.0, 5.0, 4.0, 3.0, 2.0, 1.0,
                                 0.0, -1.0, -2.0, -3.0, -4.0, -5.0, -6.0, -7.0, -8.0, -9.0};
    const auto sel = select_threshold(ys, 0.1);
    CHECK(sel.threshold == 8.5);
    CHECK(sel.exceedances == 2);
    CHECK_FALSE(sel.tie);

    const std::vector<double> flat(10, 3.0);
    const auto tied = select_threshold(flat, 0.1);
    CHECK(tied.tie);
    CHECK(tied.threshold == 3.0);
    CHECK(tied.exceedances == 0);

    CHECK_THROWS_AS((void)select_threshold(std::vector<double>(15, 0.0), 0.1), DomainError);
    CHECK_THROWS_AS((void)select_threshold(std::vector<double>(5, 0.0), 0.1), DomainError);
}

TEST_CASE("config validation") {
    SsConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.seeds_per_level() == 100);
    CHECK(c.chain_length() == 10);

    c.level_probability = 0.15;
    CHECK_THROWS_WITH_AS(c.validate(), "n*p and 1/p must be integers; got n=1000, p=0.15", DomainError);
    c.level_probability = 0.1;
    c.samples_per_level = 1005;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.samples_per_level = 1000;
    c.level_probability = 0.0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.level_probability = 0.5;
    CHECK_NOTHROW(c.validate());
    c.max_levels = 0;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.max_levels = 5;
    c.proposal = ProposalSpec::gaussian(-1.0);
    CHECK_THROWS_AS(c.validate(), DomainError);
}

TEST_CASE("no conditional level reduces to direct Monte Carlo") {
    const FailureSpec spec{linear_sum_model(3), 0.5};
    RandomStream a(42), b(42);
    const auto ss = run_subset_simulation(spec, small_config(), a);
    const auto dmc = dmc_estimate(spec, 500, b);
    CHECK(ss.levels == 0);
    CHECK(ss.p_hat == dmc.p_hat);
    CHECK(ss.total_samples == 500);
    CHECK(ss.total_evaluations == 500);
    CHECK(ss.thresholds.empty());
    CHECK(std::isnan(ss.level_records.at(0).threshold));
    CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("two-dimensional rare event, single run") {
    const FailureSpec spec{linear_sum_model(2), 9.0};
    SsConfig cfg;
    cfg.seed = 0;
    const auto est = run_subset_simulation(spec, cfg);
    CHECK(est.levels >= 8);
    CHECK(est.levels <= 11);
    CHECK(est.total_samples == expected_total_samples(est.levels, cfg));
    CHECK(est.p_hat > 1e-11);
    CHECK(est.p_hat < 1e-9);
    CHECK_FALSE(est.tie_warning);
}

TEST_CASE("structural invariants across seeds") {
    const FailureSpec spec{linear_sum_model(2), 7.0};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CAPTURE(seed);
        auto cfg = small_config(seed);
        cfg.keep_samples = true;
        const auto est = run_subset_simulation(spec, cfg);
        const double p = cfg.level_probability;
        const std::size_t n = cfg.samples_per_level;
        REQUIRE(est.level_records.size() == est.levels + 1);
        REQUIRE(est.thresholds.size() == est.levels);

        double product = 1.0;
        for (std::size_t l = 0; l < est.levels; ++l) {
            if (l > 0) CHECK(est.thresholds[l] > est.thresholds[l - 1]);
            CHECK(est.thresholds[l] < spec.critical_threshold);
            const auto& prev = est.level_records[l];
            const auto& rec = est.level_records[l + 1];
            CHECK(rec.threshold == est.thresholds[l]);
            CHECK(rec.n_failures >= prev.n_failures);
            for (const auto& s : rec.samples) CHECK(s.response > rec.threshold);
            const auto above = std::count_if(prev.sorted_responses.begin(), prev.sorted_responses.end(),
                                             [&](double y) { return y > rec.threshold; });
            // Copies of one repeated chain state may sit on both sides of rank np.
            if (rec.repeated_state_tie) {
                CHECK(static_cast<std::size_t>(above) >= cfg.seeds_per_level());
            } else {
                CHECK(static_cast<std::size_t>(above) == cfg.seeds_per_level());
            }
            CHECK(rec.n_seeds == cfg.seeds_per_level());
            CHECK(rec.new_samples == n - cfg.seeds_per_level());
            CHECK(rec.acceptance_stats->chain_steps == n - rec.n_seeds);
            product *= rec.conditional_probability;
        }
        CHECK(product == doctest::Approx(std::pow(p, static_cast<double>(est.levels))).epsilon(1e-14));
        const double n_f = static_cast<double>(est.level_records.back().n_failures);
        CHECK(est.p_hat == doctest::Approx(std::pow(p, static_cast<double>(est.levels)) * n_f / n).epsilon(1e-14));
        CHECK(est.level_records.back().n_failures >= cfg.seeds_per_level());
        CHECK(est.total_samples == expected_total_samples(est.levels, cfg));
        std::uint64_t evals = 0;
        for (const auto& rec : est.level_records) {
            evals += rec.evaluations_used;
            CHECK(std::is_sorted(rec.sorted_responses.rbegin(), rec.sorted_responses.rend()));
        }
        CHECK(est.total_evaluations == evals);
    }
}

TEST_CASE("reruns and execution modes agree bit for bit") {
    const FailureSpec spec{linear_sum_model(10), 12.0};
    auto cfg = small_config(9);
    const auto a = run_subset_simulation(spec, cfg, Execution::serial);
    const auto b = run_subset_simulation(spec, cfg, Execution::serial);
    const auto c = run_subset_simulation(spec, cfg, Execution::parallel);
    CHECK(a.p_hat == b.p_hat);
    CHECK(a.p_hat == c.p_hat);
    CHECK(a.thresholds == c.thresholds);
    REQUIRE(a.level_records.size() == c.level_records.size());
    for (std::size_t l = 0; l < a.level_records.size(); ++l) {
        CHECK(a.level_records[l].sorted_responses == c.level_records[l].sorted_responses);
        CHECK(a.level_records[l].evaluations_used == c.level_records[l].evaluations_used);
    }
    cfg.seed = 10;
    CHECK(run_subset_simulation(spec, cfg).p_hat != a.p_hat);
}

TEST_CASE("matches the straight-line reference") {
    for (std::size_t d : {1u, 2u, 20u}) {
        for (std::uint64_t seed : {0u, 1u, 2u}) {
            CAPTURE(d);
            CAPTURE(seed);
            const FailureSpec spec{linear_sum_model(d), 3.5 * std::sqrt(static_cast<double>(d))};
            const auto ref = testing::reference_subset_simulation(spec, 0.1, 500, 1.0, seed);
            for (auto exec : {Execution::serial, Execution::parallel}) {
                auto cfg = small_config(seed);
                cfg.keep_samples = true;
                const auto est = run_subset_simulation(spec, cfg, exec);
                CHECK(est.p_hat == ref.p_hat);
                CHECK(est.levels == ref.levels);
                CHECK(est.thresholds == ref.thresholds);
                CHECK(est.total_samples == ref.total_samples);
                REQUIRE(est.level_records.size() == ref.responses.size());
                for (std::size_t l = 0; l < ref.responses.size(); ++l) {
                    std::vector<double> pooled;
                    for (const auto& s : est.level_records[l].samples) pooled.push_back(s.response);
                    CHECK(pooled == ref.responses[l]);
                }
            }
        }
    }
}

TEST_CASE("max_levels aborts with partial records") {
    // tanh(sum) never exceeds 1, so y* = 2 is unreachable.
    const FailureSpec spec{PerformanceModel(2, [](std::span<const double> x) { return std::tanh(x[0] + x[1]); },
                                            "bounded"),
                           2.0};
    auto cfg = small_config(1);
    cfg.max_levels = 3;
    try {
        (void)run_subset_simulation(spec, cfg);
        FAIL("expected SimulationAborted");
    } catch (const SimulationAborted& e) {
        CHECK(e.reason() == SimulationAborted::Reason::budget_exceeded);
        CHECK(e.partial_records().size() == 4);
        CHECK(std::string(e.what()).find("max_levels=3") != std::string::npos);
    }
}

TEST_CASE("distinct points with tied responses") {
    // Integer-valued responses tie across different points.
    const FailureSpec spec{PerformanceModel(2, [](std::span<const double> x) { return std::floor(x[0] + x[1]); },
                                            "floored sum"),
                           4.5};
    bool saw_warning = false;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto est = run_subset_simulation(spec, small_config(seed));
        double product = 1.0;
        for (std::size_t l = 1; l < est.level_records.size(); ++l) {
            const auto& rec = est.level_records[l];
            CHECK(rec.conditional_probability == static_cast<double>(rec.n_seeds) / 500.0);
            product *= rec.conditional_probability;
            saw_warning = saw_warning || rec.tie_warning;
        }
        const double n_f = static_cast<double>(est.level_records.back().n_failures);
        CHECK(est.p_hat == doctest::Approx(product * n_f / 500.0).epsilon(1e-14));
    }
    CHECK(saw_warning);
}

TEST_CASE("all responses tied aborts as degenerate") {
    const FailureSpec spec{PerformanceModel(1, [](std::span<const double>) { return 0.0; }, "constant"), 1.0};
    try {
        (void)run_subset_simulation(spec, small_config());
        FAIL("expected SimulationAborted");
    } catch (const SimulationAborted& e) {
        CHECK(e.reason() == SimulationAborted::Reason::degenerate_level);
        CHECK(e.partial_records().size() == 1);
    }
}

TEST_CASE("expected level count") {
    CHECK(expected_levels(1e-10, 0.1) == 10);
    CHECK(expected_levels(9.83e-11, 0.1) == 10);
    CHECK(expected_levels(1.27e-10, 0.1) == 9);
    CHECK(expected_levels(0.05, 0.1) == 1);
    CHECK(expected_levels(0.1, 0.1) == 1);
    CHECK(expected_levels(0.5, 0.1) == 0);
    CHECK(expected_levels(1e-4, 0.5) == 13);
    CHECK_THROWS_AS((void)expected_levels(0.0, 0.1), DomainError);

    SsConfig cfg;
    CHECK(expected_total_samples(0, cfg) == 1000);
    CHECK(expected_total_samples(9, cfg) == 9100);
}

TEST_CASE("keep_samples off keeps records light") {
    const FailureSpec spec{linear_sum_model(2), 5.0};
    const auto est = run_subset_simulation(spec, small_config(3));
    for (const auto& rec : est.level_records) CHECK(rec.samples.empty());
}

TEST_CASE("adaptive spread is recorded per level") {
    const FailureSpec spec{linear_sum_model(2), 7.0};
    auto cfg = small_config(4);
    cfg.adapt = true;
    cfg.proposal = ProposalSpec::gaussian(5.0);
    const auto est = run_subset_simulation(spec, cfg);
    REQUIRE(est.levels >= 2);
    CHECK(est.level_records[1].proposal->spread[0] == 5.0);
    const auto& s1 = *est.level_records[1].acceptance_stats;
    CHECK(est.level_records[2].proposal->spread[0] == adapt_spread(s1, ProposalSpec::gaussian(5.0)).spread[0]);

    cfg.adapt = false;
    const auto fixed = run_subset_simulation(spec, cfg);
    for (std::size_t l = 1; l < fixed.level_records.size(); ++l) {
        CHECK(fixed.level_records[l].proposal->spread[0] == 5.0);
    }
}
