#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "subsim/errors.hpp"
#include "subsim/model.hpp"

using namespace subsim;

TEST_CASE("indicator is strict at the threshold") {
    const FailureSpec spec{linear_sum_model(2), 9.0};
    CHECK(indicator(spec, Sample{{4.0, 5.0}, 9.0}) == 0);
    CHECK(indicator(spec, Sample{{4.0, 5.1}, 9.1}) == 1);
    CHECK(indicator(spec, Sample{{0.0, 0.0}, 0.0}) == 0);
    CHECK(indicator(spec, Sample{{0.0, 0.0}, std::nextafter(9.0, 10.0)}) == 1);
    CHECK_FALSE(spec.fails(9.0));
}

TEST_CASE("linear_sum_model") {
    const auto g = linear_sum_model(3);
    CHECK(g.dim() == 3);
    const std::vector<double> x{1.0, -2.0, 0.5};
    CHECK(g.evaluate(x) == doctest::Approx(-0.5));
    CHECK(make_sample(g, x).response == doctest::Approx(-0.5));

    SUBCASE("permutation invariant") {
        std::vector<double> p{0.3, -1.7, 2.2};
        const double base = g.evaluate(p);
        std::sort(p.begin(), p.end());
        do {
            CHECK(g.evaluate(p) == doctest::Approx(base).epsilon(1e-15));
        } while (std::next_permutation(p.begin(), p.end()));
    }

    SUBCASE("monotone in each coordinate") {
        std::vector<double> p{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < 3; ++k) {
            auto q = p;
            q[k] += 0.25;
            CHECK(g.evaluate(q) > g.evaluate(p));
        }
    }

    CHECK_THROWS_AS((void)linear_sum_model(0), DomainError);
    CHECK_THROWS_AS((void)g.evaluate(std::vector<double>{1.0, 2.0}), DomainError);
}

TEST_CASE("analytic failure probability") {
    CHECK(analytic_failure_probability(2, 9.0) == doctest::Approx(9.830802207714437e-11).epsilon(1e-12));
    CHECK(analytic_failure_probability(1000, 200.0) == doctest::Approx(1.2698142947354325e-10).epsilon(1e-12));
    CHECK(analytic_failure_probability(5, 0.0) == 0.5);
    CHECK_THROWS_AS((void)analytic_failure_probability(0, 1.0), DomainError);

    double prev = 1.0;
    for (double y = -5.0; y <= 50.0; y += 0.5) {
        const double p = analytic_failure_probability(4, y);
        CHECK(p <= prev);
        prev = p;
    }
}

TEST_CASE("threshold_for_probability round trip") {
    CHECK(threshold_for_probability(2, 1e-10) == doctest::Approx(8.996294579058519).epsilon(1e-12));
    for (std::size_t d : {1u, 2u, 10u, 1000u}) {
        for (double e = -12.0; e <= std::log10(0.5); e += 0.25) {
            const double p = std::pow(10.0, e);
            CAPTURE(d);
            CAPTURE(p);
            const double y = threshold_for_probability(d, p);
            CHECK(std::abs(analytic_failure_probability(d, y) - p) <= 1e-6 * p);
        }
    }
    CHECK_THROWS_AS((void)threshold_for_probability(2, 0.0), DomainError);
    CHECK_THROWS_AS((void)threshold_for_probability(2, 1.0), DomainError);
}

TEST_CASE("standardize and destandardize") {
    const MarginalSpec m{{10.0, -1.0}, {2.0, 0.5}};
    const std::vector<double> x{14.0, -1.25};
    const auto z = standardize(x, m);
    CHECK(z[0] == doctest::Approx(2.0));
    CHECK(z[1] == doctest::Approx(-0.5));
    const auto back = destandardize(z, m);
    CHECK(back[0] == doctest::Approx(14.0));
    CHECK(back[1] == doctest::Approx(-1.25));

    CHECK_THROWS_AS(MarginalSpec({0.0}, {0.0}).validate(), DomainError);
    CHECK_THROWS_AS(MarginalSpec({0.0, 1.0}, {1.0}).validate(), DomainError);
    CHECK_THROWS_AS((void)standardize(std::vector<double>{1.0}, m), DomainError);
}

TEST_CASE("with_marginals lifts a physical model") {
    // Physical sum of N(10, 2^2) and N(-1, 0.5^2), evaluated at z = (1, 2).
    PerformanceModel physical(2, [](std::span<const double> x) { return x[0] + x[1]; }, "physical sum");
    const auto lifted = with_marginals(physical, MarginalSpec{{10.0, -1.0}, {2.0, 0.5}});
    CHECK(lifted.dim() == 2);
    CHECK(lifted.evaluate(std::vector<double>{1.0, 2.0}) == doctest::Approx(12.0 + 0.0));
    CHECK_THROWS_AS((void)with_marginals(physical, MarginalSpec{{0.0}, {1.0}}), DomainError);
}
