#include "subsim/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "subsim/dmc.hpp"
#include "subsim/experiments.hpp"
#include "subsim/mma.hpp"
#include "subsim/normal.hpp"
#include "subsim/subset_simulation.hpp"

namespace subsim {

namespace {

CheckResult check(const std::string& name, const std::function<std::string()>& body) {
    CheckResult r{name, true, {}};
    try {
        r.detail = body();
        if (!r.detail.empty()) r.passed = false;
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    return r;
}

bool same_estimate(const SsEstimate& a, const SsEstimate& b) {
    if (a.p_hat != b.p_hat || a.levels != b.levels || a.thresholds != b.thresholds ||
        a.total_evaluations != b.total_evaluations) {
        return false;
    }
    for (std::size_t l = 0; l < a.level_records.size(); ++l) {
        if (a.level_records[l].sorted_responses != b.level_records[l].sorted_responses) return false;
    }
    return true;
}

}  // namespace

std::vector<CheckResult> run_selftest(bool quick) {
    std::vector<CheckResult> out;

    out.push_back(check("normal identities", [] {
        for (double x = -8.0; x <= 8.0; x += 0.25) {
            if (normal_pdf(x) != normal_pdf(-x)) return std::string("pdf not even");
            if (std::abs(normal_cdf(-x) - (1.0 - normal_cdf(x))) > 1e-14) return std::string("cdf symmetry");
            if (x <= 0.0 && std::abs(normal_quantile(normal_cdf(x)) - x) > 1e-9) return std::string("quantile roundtrip");
            if (x >= 0.0 && std::abs(normal_isf(normal_sf(x)) - x) > 1e-9) return std::string("isf roundtrip");
        }
        return std::string();
    }));

    out.push_back(check("stream determinism", [] {
        RandomStream a(42), b(42);
        for (int i = 0; i < 1000; ++i) {
            if (a.next_normal() != b.next_normal()) return std::string("sequences differ");
        }
        return std::string();
    }));

    out.push_back(check("mma no leakage and evaluation accounting", [] {
        const FailureSpec spec{linear_sum_model(3), 10.0};
        const ModifiedMetropolis kernel(spec, 2.0, ProposalSpec::gaussian(1.0));
        RandomStream stream(7);
        std::vector<double> x{1.0, 1.0, 1.0}, y(3);
        double r = 3.0;
        for (int i = 0; i < 2000; ++i) {
            MmaStats st;
            r = kernel.step(x, r, y, stream, st);
            if (!(r > 2.0)) return std::string("sample left the level domain");
            if (st.evaluations > 1) return std::string("more than one evaluation per step");
            if ((st.coordinate_acceptances == 0) != (st.evaluations == 0)) {
                return std::string("evaluation without a moved coordinate or vice versa");
            }
            x.swap(y);
        }
        return std::string();
    }));

    out.push_back(check("L=0 reduces to DMC", [] {
        const FailureSpec spec{linear_sum_model(1), 0.0};
        SsConfig cfg;
        cfg.samples_per_level = 1000;
        RandomStream s1(11), s2(11);
        const auto ss = run_subset_simulation(spec, cfg, s1);
        const auto dmc = dmc_estimate(spec, 1000, s2);
        if (ss.levels != 0) return std::string("expected L = 0");
        if (ss.p_hat != dmc.p_hat) return std::string("estimates differ");
        return std::string();
    }));

    out.push_back(check("level structure on d=2", [quick] {
        const FailureSpec spec{linear_sum_model(2), quick ? 6.0 : 8.0};
        SsConfig cfg;
        cfg.samples_per_level = 500;
        for (std::uint64_t seed = 0; seed < (quick ? 3u : 10u); ++seed) {
            cfg.seed = seed;
            const auto est = run_subset_simulation(spec, cfg);
            for (std::size_t l = 1; l < est.thresholds.size(); ++l) {
                if (!(est.thresholds[l] > est.thresholds[l - 1])) return std::string("thresholds not increasing");
            }
            for (std::size_t l = 1; l < est.level_records.size(); ++l) {
                if (est.level_records[l].n_failures < est.level_records[l - 1].n_failures) {
                    return std::string("n_F decreased");
                }
            }
            if (est.total_samples != expected_total_samples(est.levels, cfg)) return std::string("budget identity");
        }
        return std::string();
    }));

    out.push_back(check("reproducible and schedule independent", [] {
        const FailureSpec spec{linear_sum_model(20), 25.0};
        SsConfig cfg;
        cfg.samples_per_level = 500;
        cfg.seed = 3;
        const auto a = run_subset_simulation(spec, cfg, Execution::serial);
        const auto b = run_subset_simulation(spec, cfg, Execution::serial);
        const auto c = run_subset_simulation(spec, cfg, Execution::parallel);
        if (!same_estimate(a, b)) return std::string("reruns differ");
        if (!same_estimate(a, c)) return std::string("parallel differs from serial");
        return std::string();
    }));

    out.push_back(check("dmc unbiased at p=0.1", [quick] {
        const double y = normal_quantile(0.9);
        const FailureSpec spec{linear_sum_model(1), y};
        const std::size_t runs = quick ? 50 : 200;
        const auto batch = replicate_dmc(spec, 1000, runs, 5);
        const double se = std::sqrt(0.1 * 0.9 / (1000.0 * static_cast<double>(runs)));
        if (std::abs(batch.p_hat.mean - 0.1) > 3.0 * se) {
            std::ostringstream msg;
            msg << "grand mean " << batch.p_hat.mean << " outside 3 SE";
            return msg.str();
        }
        return std::string();
    }));

    return out;
}

}  // namespace subsim
